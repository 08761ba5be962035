#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dickedim/model.hpp"

namespace dickedim {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Identifies one solve: couplings, j, cutoff, sector and the energy ceiling.
std::string cache_key(const ModelParams& params, const BasisSpec& basis, const DiagonalizeOptions& opts);

/// Directory from DICKEDIM_CACHE_DIR, or empty when unset.
std::filesystem::path default_cache_dir();

/// A decomposition is stored as <key>.bin (raw energies, parities, vectors) next to
/// <key>.json (parameters, shape, content hash).
void save_decomposition(const std::filesystem::path& dir, const EigenDecomposition& dec,
                        const DiagonalizeOptions& opts);

/// Returns nullopt when absent. A sidecar/hash mismatch or a short file is reported in
/// `warnings` and also yields nullopt, so the caller recomputes.
std::optional<EigenDecomposition> load_decomposition(const std::filesystem::path& dir, const ModelParams& params,
                                                     const BasisSpec& basis, const DiagonalizeOptions& opts,
                                                     std::vector<std::string>* warnings = nullptr);

/// diagonalize() through the cache (no cache when dir is empty).
EigenDecomposition cached_diagonalize(const std::filesystem::path& dir, const ModelParams& params,
                                      const BasisSpec& basis, const DiagonalizeOptions& opts = {},
                                      std::vector<std::string>* warnings = nullptr);

/// diagonalize_converged() with both solves going through the cache.
EigenDecomposition cached_diagonalize_converged(const std::filesystem::path& dir, const ModelParams& params,
                                                int n_max, int n_max_check, Parity sector, double tol = 1e-6,
                                                const DiagonalizeOptions& opts = {},
                                                std::vector<std::string>* warnings = nullptr);

}  // namespace dickedim
