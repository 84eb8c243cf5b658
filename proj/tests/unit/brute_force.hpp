#pragma once

// Reference computations for tests. Everything here is written from the
// definitions with plain loops and std::next_permutation, and deliberately
// avoids the library's enumeration, epoch-map and moment code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "sgdlab/model.hpp"

namespace brute {

inline std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Every 0/1 sequence with n/2 ones.
inline std::vector<std::vector<int>> balanced_labels(std::size_t n) {
  std::vector<int> l(n, 0);
  std::fill(l.begin() + static_cast<std::ptrdiff_t>(n / 2), l.end(), 1);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(l);
  } while (std::next_permutation(l.begin(), l.end()));
  return out;
}

// One SGD pass in the diagonal frame over `order`.
inline sgdlab::Vector run_order(const sgdlab::Problem& p, const std::vector<std::size_t>& order,
                                double eta, sgdlab::Vector y) {
  for (const std::size_t i : order) {
    const auto& c = p.component(i);
    for (Eigen::Index j = 0; j < y.size(); ++j) y(j) -= eta * (c.curvatures(j) * y(j) - c.linear(j));
  }
  return y;
}

inline double loss_diag(const sgdlab::Problem& p, const sgdlab::Vector& y) {
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = p.component(i);
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      f += 0.5 * c.curvatures(j) * y(j) * y(j) - c.linear(j) * y(j);
    }
  }
  return f / static_cast<double>(p.size());
}

// E[F(x_k)] for single shuffling: one permutation reused k times.
inline double ss_expected_loss(const sgdlab::Problem& p, double eta, std::size_t k,
                               const sgdlab::Vector& y0) {
  const auto perms = all_permutations(p.size());
  double total = 0.0;
  for (const auto& perm : perms) {
    sgdlab::Vector y = y0;
    for (std::size_t e = 0; e < k; ++e) y = run_order(p, perm, eta, y);
    total += loss_diag(p, y);
  }
  return total / static_cast<double>(perms.size());
}

// E[F(x_k)] for random reshuffling over all (n!)^k permutation sequences.
inline double rr_expected_loss(const sgdlab::Problem& p, double eta, std::size_t k,
                               const sgdlab::Vector& y0) {
  const auto perms = all_permutations(p.size());
  double total = 0.0;
  std::size_t count = 0;
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    sgdlab::Vector y = y0;
    for (std::size_t e = 0; e < k; ++e) y = run_order(p, perms[idx[e]], eta, y);
    total += loss_diag(p, y);
    ++count;
    std::size_t e = 0;
    while (e < k && ++idx[e] == perms.size()) idx[e++] = 0;
    if (e == k) break;
  }
  return total / static_cast<double>(count);
}

// E[F(x_k)] for with-replacement sampling over all n^(nk) index sequences.
inline double wr_expected_loss(const sgdlab::Problem& p, double eta, std::size_t k,
                               const sgdlab::Vector& y0) {
  const std::size_t n = p.size();
  const std::size_t steps = n * k;
  std::vector<std::size_t> seq(steps, 0);
  double total = 0.0;
  std::size_t count = 0;
  while (true) {
    total += loss_diag(p, run_order(p, seq, eta, y0));
    ++count;
    std::size_t s = 0;
    while (s < steps && ++seq[s] == n) seq[s++] = 0;
    if (s == steps) break;
  }
  return total / static_cast<double>(count);
}

}  // namespace brute
