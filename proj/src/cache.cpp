#include "dickedim/cache.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dickedim/common.hpp"

namespace dickedim {

namespace {

constexpr std::uint32_t kMagic = 0x44444543;  // "CEDD"
constexpr std::uint32_t kFormat = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const char* sector_name(Parity p) {
  switch (p) {
    case Parity::all: return "all";
    case Parity::positive: return "positive";
    case Parity::negative: return "negative";
  }
  return "?";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::string_view& in, T& v) {
  if (in.size() < sizeof v) return false;
  std::memcpy(&v, in.data(), sizeof v);
  in.remove_prefix(sizeof v);
  return true;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string cache_key(const ModelParams& params, const BasisSpec& basis, const DiagonalizeOptions& opts) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "w=%.17g;w0=%.17g;g=%.17g;j=%.17g;nmax=%d;sector=%s;emax=%.17g", params.omega,
                params.omega0, params.gamma, params.j, basis.n_max, sector_name(basis.sector), opts.eps_max);
  return hex64(fnv1a(buf));
}

std::filesystem::path default_cache_dir() {
  const char* env = std::getenv("DICKEDIM_CACHE_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path();
}

void save_decomposition(const std::filesystem::path& dir, const EigenDecomposition& dec,
                        const DiagonalizeOptions& opts) {
  std::filesystem::create_directories(dir);
  const std::string key = cache_key(dec.params, dec.basis, opts);

  std::string blob;
  const auto rows = static_cast<std::uint64_t>(dec.vectors.rows());
  const auto cols = static_cast<std::uint64_t>(dec.vectors.cols());
  blob.reserve(32 + 8 * cols * (rows + 2));
  put(blob, kMagic);
  put(blob, kFormat);
  put(blob, rows);
  put(blob, cols);
  blob.append(reinterpret_cast<const char*>(dec.energies.data()), sizeof(double) * cols);
  for (int p : dec.parities) put(blob, static_cast<std::int32_t>(p));
  blob.append(reinterpret_cast<const char*>(dec.vectors.data()), sizeof(double) * rows * cols);

  nlohmann::json meta = {
      {"key", key},
      {"omega", dec.params.omega},
      {"omega0", dec.params.omega0},
      {"gamma", dec.params.gamma},
      {"j", dec.params.j},
      {"n_max", dec.basis.n_max},
      {"sector", sector_name(dec.basis.sector)},
      {"eps_max", std::isfinite(opts.eps_max) ? nlohmann::json(opts.eps_max) : nlohmann::json("inf")},
      {"rows", rows},
      {"levels", cols},
      {"content_hash", hex64(fnv1a(blob))},
      {"version", version()},
  };
  // Write both to temporaries first so a crash never leaves a half-written pair behind.
  const auto bin = dir / (key + ".bin"), js = dir / (key + ".json");
  {
    std::ofstream out(bin.string() + ".tmp", std::ios::binary);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw std::runtime_error("cannot write cache file " + bin.string());
  }
  {
    std::ofstream out(js.string() + ".tmp");
    out << meta.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write cache file " + js.string());
  }
  std::filesystem::rename(bin.string() + ".tmp", bin);
  std::filesystem::rename(js.string() + ".tmp", js);
}

std::optional<EigenDecomposition> load_decomposition(const std::filesystem::path& dir, const ModelParams& params,
                                                     const BasisSpec& basis, const DiagonalizeOptions& opts,
                                                     std::vector<std::string>* warnings) {
  const std::string key = cache_key(params, basis, opts);
  const auto bin = dir / (key + ".bin"), js = dir / (key + ".json");
  if (!std::filesystem::exists(bin) || !std::filesystem::exists(js)) return std::nullopt;

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back("cache " + key + ": " + msg + "; recomputing");
    return std::nullopt;
  };

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(js));
  } catch (const std::exception&) {
    return warn("unreadable sidecar");
  }
  const std::string blob = read_file(bin);
  if (meta.value("content_hash", std::string()) != hex64(fnv1a(blob))) return warn("content hash mismatch");
  if (meta.value("j", -1.0) != params.j || meta.value("n_max", -1) != basis.n_max ||
      meta.value("omega", -1.0) != params.omega || meta.value("omega0", -1.0) != params.omega0 ||
      meta.value("gamma", -1.0) != params.gamma || meta.value("sector", std::string()) != sector_name(basis.sector)) {
    return warn("sidecar parameters differ from the request");
  }

  std::string_view in(blob);
  std::uint32_t magic = 0, format = 0;
  std::uint64_t rows = 0, cols = 0;
  if (!get(in, magic) || !get(in, format) || !get(in, rows) || !get(in, cols) || magic != kMagic ||
      format != kFormat) {
    return warn("bad header");
  }
  BasisSpec full = basis;
  full.sector = Parity::all;
  if (rows != full.full_dimension() || in.size() != cols * (sizeof(double) + sizeof(std::int32_t) + rows * sizeof(double))) {
    return warn("shape mismatch");
  }
  EigenDecomposition dec;
  dec.params = params;
  dec.basis = basis;
  dec.energies.resize(static_cast<Eigen::Index>(cols));
  std::memcpy(dec.energies.data(), in.data(), sizeof(double) * cols);
  in.remove_prefix(sizeof(double) * cols);
  dec.parities.resize(cols);
  for (auto& p : dec.parities) {
    std::int32_t v = 0;
    get(in, v);
    p = v;
  }
  dec.vectors.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::memcpy(dec.vectors.data(), in.data(), sizeof(double) * rows * cols);
  dec.converged_count = cols;
  return dec;
}

EigenDecomposition cached_diagonalize(const std::filesystem::path& dir, const ModelParams& params,
                                      const BasisSpec& basis, const DiagonalizeOptions& opts,
                                      std::vector<std::string>* warnings) {
  if (dir.empty()) return diagonalize(params, basis, opts);
  if (auto hit = load_decomposition(dir, params, basis, opts, warnings)) return std::move(*hit);
  auto dec = diagonalize(params, basis, opts);
  save_decomposition(dir, dec, opts);
  return dec;
}

EigenDecomposition cached_diagonalize_converged(const std::filesystem::path& dir, const ModelParams& params,
                                                int n_max, int n_max_check, Parity sector, double tol,
                                                const DiagonalizeOptions& opts, std::vector<std::string>* warnings) {
  if (n_max_check <= n_max) throw std::invalid_argument("n_max_check must exceed n_max");
  auto hi = cached_diagonalize(dir, params, BasisSpec{params.j, n_max_check, sector}, opts, warnings);
  {
    const auto lo = cached_diagonalize(dir, params, BasisSpec{params.j, n_max, sector}, opts, warnings);
    hi.converged_count = std::min(converged_levels(lo, hi, tol), hi.n_levels());
  }
  return hi;
}

}  // namespace dickedim
