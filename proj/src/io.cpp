#include "paramkl/io.hpp"

#include "paramkl/csv.hpp"
#include "paramkl/error.hpp"
#include "paramkl/hash.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace paramkl::io
{

using nlohmann::json;

namespace
{

constexpr const char* kSpdPacking = "upper-row-major-sqrt2";

fs::path ensure_dir(const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw FormatError("cannot create directory " + dir.string());
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& manifest_name, json manifest,
    const std::vector<std::string>& files)
{
  manifest["schema_version"] = kSchemaVersion;
  manifest["files"] = files;
  manifest["sha256"] = content_hash(dir, files);
  write_text(dir / manifest_name, manifest.dump(2) + "\n");
}

json read_manifest(const fs::path& dir, const std::string& manifest_name, const std::string& kind)
{
  const fs::path file = dir / manifest_name;
  if (!fs::exists(file))
    throw FormatError("missing manifest: " + file.string() + " does not exist");
  json manifest;
  try
  {
    manifest = json::parse(read_text(file));
  }
  catch (const json::exception& e)
  {
    throw FormatError("malformed manifest " + file.string() + ": " + e.what());
  }
  if (!manifest.is_object()) throw FormatError("manifest " + file.string() + " is not an object");
  if (manifest.value("schema_version", std::string{}) != kSchemaVersion)
    throw FormatError("manifest " + file.string() + ": unsupported schema_version (expected \"" +
                      std::string(kSchemaVersion) + "\")");
  if (manifest.value("kind", std::string{}) != kind)
    throw FormatError("manifest " + file.string() + ": expected kind \"" + kind + "\", got \"" +
                      manifest.value("kind", std::string{}) + "\"");
  if (manifest.contains("files"))
  {
    std::vector<std::string> files;
    try
    {
      files = manifest.at("files").get<std::vector<std::string>>();
    }
    catch (const json::exception& e)
    {
      throw FormatError("manifest " + file.string() + ": bad files list: " + e.what());
    }
    for (const auto& f : files)
      if (!fs::exists(dir / f)) throw FormatError("manifest references missing file " + (dir / f).string());
    const std::string expected = manifest.value("sha256", std::string{});
    const std::string actual = content_hash(dir, files);
    if (expected != actual)
      throw HashMismatchError("hash mismatch in " + file.string() + ": manifest says " + expected +
                              ", files hash to " + actual);
  }
  return manifest;
}

template <typename T>
T field(const json& manifest, const char* key)
{
  try
  {
    return manifest.at(key).get<T>();
  }
  catch (const json::exception& e)
  {
    throw FormatError(std::string("manifest field '") + key + "': " + e.what());
  }
}

void write_grid(const fs::path& dir, const ParameterGrid& grid)
{
  csv::write(dir / "points.csv", grid.points());
  csv::write(dir / "weights.csv", grid.weights());
}

ParameterGrid read_grid(const fs::path& dir, const json& manifest, Index m)
{
  const auto points_file = manifest.value("points_file", std::string("points.csv"));
  MatrixXd points = csv::read(dir / points_file, m, std::nullopt);
  if (manifest.contains("d_p") && points.cols() != field<Index>(manifest, "d_p"))
    throw FormatError("points file has " + std::to_string(points.cols()) +
                      " columns but manifest d_p differs");
  if (manifest.contains("weights_file") && !manifest.at("weights_file").is_null())
  {
    MatrixXd w = csv::read(dir / field<std::string>(manifest, "weights_file"), m, 1);
    return ParameterGrid(std::move(points), VectorXd(w.col(0)));
  }
  return ParameterGrid::with_uniform_weights(std::move(points));
}

void write_f64(const fs::path& file, const MatrixXd& m)
{
  std::string bytes;
  bytes.resize(static_cast<std::size_t>(m.size()) * 8);
  for (Index k = 0; k < m.size(); ++k)
  {
    const auto bits = std::bit_cast<std::uint64_t>(m.data()[k]);
    for (int b = 0; b < 8; ++b)
      bytes[static_cast<std::size_t>(k) * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_text(file, bytes);
}

MatrixXd read_f64(const fs::path& file, Index rows, Index cols)
{
  const std::string bytes = read_text(file);
  if (static_cast<Index>(bytes.size()) != rows * cols * 8)
    throw FormatError(file.string() + ": expected " + std::to_string(rows * cols * 8) + " bytes, got " +
                      std::to_string(bytes.size()));
  MatrixXd m(rows, cols);
  for (Index k = 0; k < m.size(); ++k)
  {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= std::uint64_t(static_cast<unsigned char>(bytes[static_cast<std::size_t>(k) * 8 + b])) << (8 * b);
    m.data()[k] = std::bit_cast<double>(bits);
  }
  return m;
}

MatrixXd flat_column(const std::vector<double>& v)
{
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> read_flat(const fs::path& file, Index count)
{
  const MatrixXd m = csv::read(file, count, 1);
  return std::vector<double>(m.data(), m.data() + m.size());
}

json model_json(const ReducedModel& rm)
{
  const SpectralData& sd = rm.spectral;
  json j;
  j["kind"] = "model";
  j["name"] = rm.source_name;
  j["N"] = sd.state_dim();
  j["M"] = sd.sample_count();
  j["d_p"] = sd.grid.dimension();
  j["n"] = rm.truncation_rank;
  j["tail_energy"] = rm.tail_energy;
  j["source_hash"] = rm.source_hash;
  j["rank_clamped"] = rm.rank_clamped;
  j["points_file"] = "points.csv";
  j["weights_file"] = "weights.csv";
  return j;
}

void write_model_payload(const ReducedModel& rm, const fs::path& dir)
{
  const SpectralData& sd = rm.spectral;
  csv::write(dir / "eigenvalues.csv", sd.eigenvalues);
  csv::write(dir / "spatial_modes.csv", sd.spatial_modes);
  csv::write(dir / "parameter_modes.csv", sd.parameter_modes);
  write_grid(dir, sd.grid);
}

const std::vector<std::string> kModelFiles = {"eigenvalues.csv", "spatial_modes.csv",
    "parameter_modes.csv", "points.csv", "weights.csv"};

ReducedModel read_model(const fs::path& dir, const json& manifest)
{
  const auto n_state = field<Index>(manifest, "N");
  const auto m = field<Index>(manifest, "M");
  const auto n = field<Index>(manifest, "n");
  ReducedModel rm{SpectralData{VectorXd(0), MatrixXd(), MatrixXd(), read_grid(dir, manifest, m)}};
  const MatrixXd eigenvalues =
      csv::read(dir / "eigenvalues.csv", n, n ? std::optional<Index>(1) : std::nullopt);
  if (n > 0) rm.spectral.eigenvalues = eigenvalues.col(0);
  rm.spectral.spatial_modes = csv::read(dir / "spatial_modes.csv", n ? std::optional<Index>(n_state) : std::nullopt, n);
  rm.spectral.parameter_modes = csv::read(dir / "parameter_modes.csv", n ? std::optional<Index>(m) : std::nullopt, n);
  if (n == 0)
  {
    rm.spectral.eigenvalues.resize(0);
    rm.spectral.spatial_modes.resize(n_state, 0);
    rm.spectral.parameter_modes.resize(m, 0);
  }
  rm.truncation_rank = n;
  rm.tail_energy = field<double>(manifest, "tail_energy");
  rm.source_name = manifest.value("name", std::string{});
  rm.source_hash = manifest.value("source_hash", std::string{});
  rm.rank_clamped = manifest.value("rank_clamped", false);
  return rm;
}

}  // namespace

void write_text(const fs::path& file, const std::string& text)
{
  if (file.has_parent_path()) ensure_dir(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + file.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("failed writing " + file.string());
}

std::string read_text(const fs::path& file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string content_hash(const fs::path& dir, const std::vector<std::string>& files)
{
  Sha256 h;
  for (const auto& f : files)
  {
    const std::string bytes = read_text(dir / f);
    h.update(f);
    h.update("\n");
    h.update(std::to_string(bytes.size()));
    h.update("\n");
    h.update(bytes);
  }
  return h.hex_digest();
}

void save_snapshots(const SnapshotSet& s, const fs::path& dir, Payload payload)
{
  ensure_dir(dir);
  json j;
  j["kind"] = "snapshots";
  j["name"] = s.name();
  j["N"] = s.state_dim();
  j["M"] = s.sample_count();
  j["d_p"] = s.grid().dimension();
  j["points_file"] = "points.csv";
  j["weights_file"] = "weights.csv";
  std::vector<std::string> files = {"values", "points.csv", "weights.csv"};
  if (payload == Payload::csv)
  {
    j["values_file"] = files[0] = "values.csv";
    j["layout"] = "column-major-csv";
    csv::write(dir / "values.csv", s.values());
  }
  else
  {
    j["values_file"] = files[0] = "values.f64";
    j["layout"] = "column-major-f64";
    write_f64(dir / "values.f64", s.values());
  }
  write_grid(dir, s.grid());
  if (!s.labels().empty())
  {
    std::string text;
    for (const auto& l : s.labels()) text += l + "\n";
    write_text(dir / "labels.txt", text);
    j["labels_file"] = "labels.txt";
    files.push_back("labels.txt");
  }
  write_manifest(dir, "manifest.json", j, files);
}

SnapshotSet load_snapshots(const fs::path& dir)
{
  const json j = read_manifest(dir, "manifest.json", "snapshots");
  const auto n = field<Index>(j, "N");
  const auto m = field<Index>(j, "M");
  const auto layout = j.value("layout", std::string("column-major-csv"));
  const auto values_file = field<std::string>(j, "values_file");
  MatrixXd values;
  if (layout == "column-major-csv")
    values = csv::read(dir / values_file, n, m);
  else if (layout == "column-major-f64")
    values = read_f64(dir / values_file, n, m);
  else
    throw FormatError("unknown snapshot layout '" + layout + "'");

  std::vector<std::string> labels;
  if (j.contains("labels_file"))
  {
    std::istringstream in(read_text(dir / field<std::string>(j, "labels_file")));
    for (std::string line; std::getline(in, line);) labels.push_back(line);
  }
  SnapshotSet s(std::move(values), read_grid(dir, j, m), j.value("name", std::string{}),
      std::move(labels));
  if (j.contains("mass_matrix_file"))
    s = apply_mass_matrix(s, csv::read(dir / field<std::string>(j, "mass_matrix_file"), n, n));
  return s;
}

void save_model(const ReducedModel& rm, const fs::path& dir)
{
  ensure_dir(dir);
  write_model_payload(rm, dir);
  write_manifest(dir, "model.json", model_json(rm), kModelFiles);
}

ReducedModel load_model(const fs::path& dir)
{
  return read_model(dir, read_manifest(dir, "model.json", "model"));
}

void save_factor(const Factor& b, const fs::path& dir)
{
  ensure_dir(dir);
  csv::write(dir / "matrix.csv", b.matrix);
  json j;
  j["kind"] = "factor";
  j["factor_kind"] = std::string(to_string(b.kind));
  j["rows"] = b.matrix.rows();
  j["cols"] = b.matrix.cols();
  j["correlation_hash"] = b.correlation_hash;
  write_manifest(dir, "factor.json", j, {"matrix.csv"});
}

Factor load_factor(const fs::path& dir)
{
  const json j = read_manifest(dir, "factor.json", "factor");
  const auto rows = field<Index>(j, "rows");
  const auto cols = field<Index>(j, "cols");
  Factor b;
  b.matrix = csv::read(dir / "matrix.csv", rows ? std::optional<Index>(rows) : std::nullopt, rows ? std::optional<Index>(cols) : std::nullopt);
  if (rows == 0) b.matrix.resize(0, cols);
  b.kind = factor_kind_from_string(field<std::string>(j, "factor_kind"));
  b.correlation_hash = j.value("correlation_hash", std::string{});
  return b;
}

void save_tensor(const FullTensor& t, const fs::path& dir)
{
  ensure_dir(dir);
  csv::write(dir / "data.csv", flat_column(t.data()));
  json j;
  j["kind"] = "tensor";
  j["dims"] = t.dims();
  j["order"] = "row-major";
  write_manifest(dir, "tensor.json", j, {"data.csv"});
}

FullTensor load_tensor(const fs::path& dir)
{
  const json j = read_manifest(dir, "tensor.json", "tensor");
  auto dims = field<std::vector<Index>>(j, "dims");
  Index count = 1;
  for (Index n : dims) count *= n;
  return FullTensor(std::move(dims), read_flat(dir / "data.csv", count));
}

void save_tt(const TTRepresentation& tt, const fs::path& dir)
{
  tt.validate();
  ensure_dir(dir);
  json j;
  j["kind"] = "tt";
  j["dims"] = tt.mode_dims();
  j["ranks"] = tt.ranks();
  j["discarded"] = tt.discarded;
  j["error_bound"] = tt_error_bound(tt.discarded);
  json cores = json::array();
  std::vector<std::string> files;
  for (std::size_t k = 0; k < tt.cores.size(); ++k)
  {
    const auto& c = tt.cores[k];
    const std::string name = "core_" + std::to_string(k) + ".csv";
    csv::write(dir / name, flat_column(c.data));
    cores.push_back({{"file", name}, {"shape", {c.left_rank, c.mode_dim, c.right_rank}}});
    files.push_back(name);
  }
  j["cores"] = cores;
  write_manifest(dir, "tt.json", j, files);
}

TTRepresentation load_tt(const fs::path& dir)
{
  const json j = read_manifest(dir, "tt.json", "tt");
  TTRepresentation tt;
  for (const auto& c : field<json>(j, "cores"))
  {
    const auto shape = field<std::vector<Index>>(c, "shape");
    if (shape.size() != 3) throw FormatError("tt core shape must have three entries");
    TTCore core{shape[0], shape[1], shape[2], {}};
    core.data = read_flat(dir / field<std::string>(c, "file"), shape[0] * shape[1] * shape[2]);
    tt.cores.push_back(std::move(core));
  }
  if (j.contains("discarded"))
    tt.discarded = field<std::vector<std::vector<double>>>(j, "discarded");
  tt.validate();
  return tt;
}

void save_density(const SpectralDensity& d, const fs::path& file)
{
  MatrixXd table(d.size(), 2);
  for (Index k = 0; k < d.size(); ++k)
  {
    table(k, 0) = d.frequency(k);
    table(k, 1) = d.values(k);
  }
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  ensure_dir(dir);
  csv::write(file, table);
  json j;
  j["kind"] = "density";
  j["points"] = d.size();
  j["spacing"] = d.spacing;
  j["length"] = d.length();
  j["max_clamped"] = d.max_clamped;
  j["admissible"] = d.admissible();
  j["columns"] = {"zeta", "k_hat"};
  write_manifest(dir, file.filename().string() + ".json", j, {file.filename().string()});
}

SpectralDensity load_density(const fs::path& file)
{
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  const json j = read_manifest(dir, file.filename().string() + ".json", "density");
  const auto m = field<Index>(j, "points");
  const MatrixXd table = csv::read(file, m, 2);
  SpectralDensity d;
  d.values = table.col(1);
  d.spacing = field<double>(j, "spacing");
  d.max_clamped = j.value("max_clamped", 0.0);
  if (!(d.spacing > 0)) throw FormatError("density spacing must be positive");
  return d;
}

void save_features(const FeatureMapSamples& f, const ParameterGrid& grid, const fs::path& dir)
{
  ensure_dir(dir);
  csv::write(dir / "g.csv", f.g_matrix());
  csv::write(dir / "x_weights.csv", f.x_weights());
  write_grid(dir, grid);
  json j;
  j["kind"] = "features";
  j["M"] = grid.size();
  j["L"] = f.feature_count();
  j["d_p"] = grid.dimension();
  j["g_file"] = "g.csv";
  j["x_weights_file"] = "x_weights.csv";
  j["points_file"] = "points.csv";
  j["weights_file"] = "weights.csv";
  write_manifest(dir, "manifest.json", j, {"g.csv", "x_weights.csv", "points.csv", "weights.csv"});
}

FeatureInput load_features(const fs::path& dir)
{
  const json j = read_manifest(dir, "manifest.json", "features");
  const auto m = field<Index>(j, "M");
  const auto l = field<Index>(j, "L");
  MatrixXd g = csv::read(dir / j.value("g_file", std::string("g.csv")), m, l);
  MatrixXd nu = csv::read(dir / j.value("x_weights_file", std::string("x_weights.csv")), l, 1);
  return FeatureInput{FeatureMapSamples(std::move(g), VectorXd(nu.col(0))), read_grid(dir, j, m)};
}

void save_spd_field(const SPDFieldSet& f, const ParameterGrid& grid, const fs::path& dir,
    SpdLayout layout, const std::string& name)
{
  if (grid.size() != f.sample_count()) throw DimensionError("SPD field and grid sizes differ");
  ensure_dir(dir);
  const Index n = f.matrix_dim();
  json j;
  j["kind"] = "spd_field";
  j["name"] = name;
  j["n"] = n;
  j["M"] = f.sample_count();
  j["d_p"] = grid.dimension();
  j["points_file"] = "points.csv";
  j["weights_file"] = "weights.csv";
  std::vector<std::string> files;
  if (layout == SpdLayout::single_csv)
  {
    MatrixXd table(f.sample_count(), n * n);
    for (Index s = 0; s < f.sample_count(); ++s)
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) table(s, a * n + b) = f.matrices()[static_cast<std::size_t>(s)](a, b);
    csv::write(dir / "matrices.csv", table);
    j["layout"] = "single-csv";
    j["matrices_file"] = "matrices.csv";
    files.push_back("matrices.csv");
  }
  else
  {
    std::vector<std::string> samples;
    for (Index s = 0; s < f.sample_count(); ++s)
    {
      const std::string file = "sample_" + std::to_string(s) + ".csv";
      csv::write(dir / file, f.matrices()[static_cast<std::size_t>(s)]);
      samples.push_back(file);
      files.push_back(file);
    }
    j["layout"] = "per-sample";
    j["sample_files"] = samples;
  }
  write_grid(dir, grid);
  files.push_back("points.csv");
  files.push_back("weights.csv");
  write_manifest(dir, "manifest.json", j, files);
}

SpdFieldInput load_spd_field(const fs::path& dir)
{
  const json j = read_manifest(dir, "manifest.json", "spd_field");
  const auto n = field<Index>(j, "n");
  const auto m = field<Index>(j, "M");
  const auto layout = field<std::string>(j, "layout");
  std::vector<MatrixXd> matrices;
  if (layout == "single-csv")
  {
    const MatrixXd table = csv::read(dir / field<std::string>(j, "matrices_file"), m, n * n);
    for (Index s = 0; s < m; ++s)
    {
      MatrixXd a(n, n);
      for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) a(r, c) = table(s, r * n + c);
      matrices.push_back(std::move(a));
    }
  }
  else if (layout == "per-sample")
  {
    const auto samples = field<std::vector<std::string>>(j, "sample_files");
    if (static_cast<Index>(samples.size()) != m) throw FormatError("sample_files count differs from M");
    for (const auto& file : samples) matrices.push_back(csv::read(dir / file, n, n));
  }
  else
    throw FormatError("unknown SPD field layout '" + layout + "'");
  return SpdFieldInput{SPDFieldSet(std::move(matrices)), read_grid(dir, j, m),
      j.value("name", std::string{})};
}

void save_spd_model(const ReducedSPDField& r, const fs::path& dir)
{
  ensure_dir(dir);
  write_model_payload(r.model, dir);
  csv::write(dir / "mean.csv", r.mean);
  json j = model_json(r.model);
  j["spd"] = {{"n", r.matrix_dim}, {"packing", kSpdPacking}, {"centered", r.centered},
      {"mean_file", "mean.csv"}};
  auto files = kModelFiles;
  files.push_back("mean.csv");
  write_manifest(dir, "model.json", j, files);
}

ReducedSPDField load_spd_model(const fs::path& dir)
{
  const json j = read_manifest(dir, "model.json", "model");
  if (!j.contains("spd")) throw FormatError("model in " + dir.string() + " is not an SPD field model");
  const json& spd = j.at("spd");
  if (field<std::string>(spd, "packing") != kSpdPacking)
    throw FormatError("unsupported SPD packing '" + field<std::string>(spd, "packing") + "'");
  const auto n = field<Index>(spd, "n");
  const MatrixXd mean = csv::read(dir / field<std::string>(spd, "mean_file"), packed_size(n), 1);
  return ReducedSPDField{n, field<bool>(spd, "centered"), mean.col(0), read_model(dir, j)};
}

}  // namespace paramkl::io
