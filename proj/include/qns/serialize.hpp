// Copyright 2026 The qns Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qns/experiments.hpp"
#include "qns/forward.hpp"
#include "qns/solvers.hpp"
#include "qns/spectrum.hpp"

namespace qns {

using Json = nlohmann::json;

// --- grid & spectrum ---------------------------------------------------
Json grid_to_json(const FrequencyGrid& grid);
FrequencyGrid grid_from_json(const Json& j);

// {grid: {n, tau, ...}, values: [...]}
Json spectrum_to_json(const Spectrum& spectrum);
Spectrum spectrum_from_json(const Json& j);

// CSV with header "omega,value".
std::string spectrum_to_csv(const Spectrum& spectrum);
Eigen::VectorXd spectrum_values_from_csv(const std::string& text);

// --- sequences -----------------------------------------------------------
// {type, M, p | j | n_pulses, seed, signs?}; signs optional on disk since
// they regenerate from the seed.
Json sequence_to_json(const SequenceSpec& seq, bool include_signs = false);
SequenceSpec sequence_from_json(const Json& j);

// --- measurement bundle ----------------------------------------------------
Json bundle_to_json(const MeasurementMatrix& matrix, const MeasurementRecord& record,
                    const FrequencyGrid& grid, const Json& truth = Json());
struct MeasurementBundle {
  MeasurementMatrix matrix;
  MeasurementRecord record;
  FrequencyGrid grid{1, 1.0};
  Json truth;  // optional embedded truth spectrum
};
MeasurementBundle bundle_from_json(const Json& j);

// --- results ----------------------------------------------------------------
Json result_to_json(const ReconstructionResult& result);
ReconstructionResult result_from_json(const Json& j);

// --- sweeps -------------------------------------------------------------
Json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const Json& j);
Json sweep_result_to_json(const SweepResult& result);
std::string sweep_result_to_csv(const SweepResult& result);

// --- misc -----------------------------------------------------------------
// FNV-1a hash of the canonical dump, as fixed-width hex; embedded in outputs
// for provenance.
std::string config_hash(const Json& j);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qns
