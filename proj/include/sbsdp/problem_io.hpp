#pragma once

#include <optional>
#include <string>

#include "sbsdp/problem.hpp"

namespace sbsdp {

/// Canonical JSON problem schema (schema_version 1):
///   {"schema_version":1, "n":int, "m":int,
///    "C":[row-major upper triangle, n(n+1)/2 numbers],
///    "A":[[...], ...],  "b":[...],
///    "solution": {"X":[upper], "y":[...], "Z":[upper],
///                 "rank_X":int, "rank_Z":int}}   // optional
/// Numbers round-trip exactly (shortest decimal that restores the double),
/// and re-serialization is byte-stable.
void write_json(const SdpProblem& p, const std::string& path,
                const KnownSolution* solution = nullptr);
SdpProblem read_json(const std::string& path);
SdpProblem read_json(const std::string& path, std::optional<KnownSolution>& solution_out);

/// SDPA sparse ".dat-s" reader, single PSD block only. File data
/// (F0, F_i, c) maps to (C, A_i, b) = (-F0, F_i, c); see README for the
/// exact grammar and the optimal-value sign relation.
SdpProblem read_sdpa(const std::string& path);

/// Writes content to path via a temporary file + rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace sbsdp
