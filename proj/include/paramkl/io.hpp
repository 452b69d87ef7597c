#pragma once

#include "paramkl/core_model.hpp"
#include "paramkl/factorization.hpp"
#include "paramkl/fields.hpp"
#include "paramkl/kernel_space.hpp"
#include "paramkl/spectral.hpp"
#include "paramkl/stationary.hpp"
#include "paramkl/tensor.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace paramkl::io
{

namespace fs = std::filesystem;

inline constexpr const char* kSchemaVersion = "1";

/// Payload encoding for snapshot values: CSV or raw little-endian float64 (column-major).
enum class Payload
{
  csv,
  f64,
};

/// SHA-256 over the listed files of `dir`: for each file, its name, a newline, its byte
/// length, a newline and its bytes.
std::string content_hash(const fs::path& dir, const std::vector<std::string>& files);

// Each directory kind carries a manifest (JSON) with schema_version, kind, dimensions,
// the referenced files and their content hash. Loading verifies schema, hash and shapes.

void save_snapshots(const SnapshotSet& s, const fs::path& dir, Payload payload = Payload::csv);
SnapshotSet load_snapshots(const fs::path& dir);

/// model.json + eigenvalues.csv + spatial_modes.csv + parameter_modes.csv + grid files.
void save_model(const ReducedModel& rm, const fs::path& dir);
ReducedModel load_model(const fs::path& dir);

/// factor.json + matrix.csv
void save_factor(const Factor& b, const fs::path& dir);
Factor load_factor(const fs::path& dir);

/// tensor.json + data.csv (flattened row-major, one value per line)
void save_tensor(const FullTensor& t, const fs::path& dir);
FullTensor load_tensor(const fs::path& dir);

/// tt.json + core_k.csv (core k flattened row-major, one value per line)
void save_tt(const TTRepresentation& tt, const fs::path& dir);
TTRepresentation load_tt(const fs::path& dir);

/// `file` holds rows (zeta_k, k_hat_k); a manifest is written next to it as `file` + ".json".
void save_density(const SpectralDensity& d, const fs::path& file);
SpectralDensity load_density(const fs::path& file);

struct FeatureInput
{
  FeatureMapSamples features;
  ParameterGrid grid;
};

/// manifest.json (kind "features") + g.csv (M x L) + x_weights.csv + grid files.
void save_features(const FeatureMapSamples& f, const ParameterGrid& grid, const fs::path& dir);
FeatureInput load_features(const fs::path& dir);

enum class SpdLayout
{
  single_csv,  ///< one M x n^2 CSV, row j = A(p_j) row-major
  per_sample,  ///< sample_j.csv, n x n each
};

struct SpdFieldInput
{
  SPDFieldSet field;
  ParameterGrid grid;
  std::string name;
};

void save_spd_field(const SPDFieldSet& f, const ParameterGrid& grid, const fs::path& dir,
    SpdLayout layout = SpdLayout::single_csv, const std::string& name = {});
SpdFieldInput load_spd_field(const fs::path& dir);

/// A reduced model directory with an extra "spd" block and mean.csv.
void save_spd_model(const ReducedSPDField& r, const fs::path& dir);
ReducedSPDField load_spd_model(const fs::path& dir);

/// Writes a text file with LF line endings, creating parent directories.
void write_text(const fs::path& file, const std::string& text);
std::string read_text(const fs::path& file);

}  // namespace paramkl::io
