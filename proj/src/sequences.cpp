// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#include "qns/sequences.hpp"

#include <stdexcept>

#include "qns/rng.hpp"

namespace qns {

RademacherSequence sample_rademacher(int m_segments, double p,
                                     std::uint64_t seed) {
  if (m_segments < 1)
    throw std::invalid_argument("sample_rademacher: m_segments < 1");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("sample_rademacher: p outside [0, 1]");
  RademacherSequence seq;
  seq.m_segments = m_segments;
  seq.p = p;
  seq.seed = seed;
  seq.signs.resize(static_cast<std::size_t>(m_segments));
  Rng rng(seed);
  for (auto& s : seq.signs) s = rng.bernoulli(p) ? +1 : -1;
  return seq;
}

std::vector<int> pulse_times(const RademacherSequence& seq) {
  std::vector<int> boundaries;
  for (std::size_t m = 0; m + 1 < seq.signs.size(); ++m)
    if (seq.signs[m + 1] != seq.signs[m])
      boundaries.push_back(static_cast<int>(m + 1));
  return boundaries;
}

double expected_pulse_count(int m_segments, double p) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("expected_pulse_count: p outside [0, 1]");
  return 2.0 * static_cast<double>(m_segments) * p * (1.0 - p);
}

}  // namespace qns
