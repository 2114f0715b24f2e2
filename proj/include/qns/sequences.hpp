// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace qns {

// Segment-sign pattern of a pseudorandom pulse sequence: U_m in {+1,-1} for
// m = 1..M, pi-pulses applied at interior boundaries where the sign flips.
// Signs regenerate bit-identically from (m_segments, p, seed).
struct RademacherSequence {
  int m_segments = 0;
  double p = 0.5;  // P(U_m = +1)
  std::uint64_t seed = 0;
  std::vector<int> signs;
};

// Ensemble of sequences whose averaged filter approximates the cosine basis
// row of index j (see fourier_ensemble_realizations in filters.hpp).
struct FourierEnsemble {
  int j_index = 0;  // in [0, m_segments]
  int m_segments = 0;
  int n_realizations = 1;
  std::uint64_t seed = 0;
};

// n evenly spaced pi-pulses over total time T.
struct CpmgSequence {
  int n_pulses = 1;
  double total_time = 1.0;
};

RademacherSequence sample_rademacher(int m_segments, double p, std::uint64_t seed);

// Interior boundary indices m (1-based, 1 <= m <= M-1) where signs[m+1] !=
// signs[m]. Endpoints carry no pulse.
std::vector<int> pulse_times(const RademacherSequence& seq);

// Expected applied-pulse count 2*M*p*(1-p). The exact interior-boundary
// expectation is (M-1)*2p(1-p); this returns the M-segment form used for
// budgeting.
double expected_pulse_count(int m_segments, double p);

}  // namespace qns
