#include "paramkl/csv.hpp"
#include "paramkl/error.hpp"
#include "paramkl/hash.hpp"
#include "paramkl/io.hpp"
#include "paramkl/report.hpp"
#include "../test_support.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <fstream>
#include <map>

#include <unistd.h>

namespace
{
  using namespace paramkl;
  using namespace paramkl::testing;
  namespace fs = std::filesystem;

  class TempDir
  {
   public:
    TempDir()
    {
      static int counter = 0;
      path_ = fs::temp_directory_path() /
              ("paramkl_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
      fs::remove_all(path_);
      fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

   private:
    fs::path path_;
  };

  std::string slurp(const fs::path& p) { return io::read_text(p); }

  /// All file contents of a directory, keyed by name.
  std::map<std::string, std::string> snapshot_dir(const fs::path& dir)
  {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
    return out;
  }

  TEST(Sha256, KnownVectors)
  {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST(Csv, RoundTripsBitwise)
  {
    std::mt19937_64 rng(101);
    MatrixXd a = random_matrix(rng, 4, 3);
    a(0, 0) = 1e-300;
    a(1, 1) = -0.1;
    a(2, 2) = 0.0;
    EXPECT_EQ(csv::parse(csv::to_string(a)), a);
    EXPECT_EQ(csv::to_string(Eigen::Vector2d(0.5, 2)), "0.5\n2\n");
  }

  TEST(Csv, ParseErrors)
  {
    EXPECT_THROW(csv::parse("1,2\n3\n"), FormatError);
    EXPECT_THROW(csv::parse("1,x\n"), FormatError);
    EXPECT_THROW(csv::parse("1,2\n", 2, 2), FormatError);
    EXPECT_THROW(csv::parse("nan\n"), FormatError);
    EXPECT_EQ(csv::parse("1,2\r\n3,4\r\n"), (MatrixXd(2, 2) << 1, 2, 3, 4).finished());
  }

  TEST(Persistence, SnapshotsCsvAndBinary)
  {
    std::mt19937_64 rng(102);
    const SnapshotSet s(random_matrix(rng, 5, 4), ParameterGrid(random_points(rng, 4, 2), random_weights(rng, 4)), "demo",
        {"a", "b", "c", "d", "e"});
    TempDir tmp;
    for (auto payload : {io::Payload::csv, io::Payload::f64})
    {
      const fs::path dir = tmp / (payload == io::Payload::csv ? "csv" : "bin");
      io::save_snapshots(s, dir, payload);
      const auto t = io::load_snapshots(dir);
      EXPECT_EQ(t.values(), s.values());
      EXPECT_EQ(t.grid().points(), s.grid().points());
      EXPECT_EQ(t.grid().weights(), s.grid().weights());
      EXPECT_EQ(t.name(), "demo");
      EXPECT_EQ(t.labels(), s.labels());
      EXPECT_EQ(fingerprint(t), fingerprint(s));
      const auto first = snapshot_dir(dir);
      io::save_snapshots(t, dir, payload);
      EXPECT_EQ(snapshot_dir(dir), first);
    }
    const auto j = nlohmann::json::parse(slurp(tmp / "csv" / "manifest.json"));
    EXPECT_EQ(j["layout"], "column-major-csv");
    EXPECT_EQ(j["N"], 5);
    EXPECT_EQ(j["M"], 4);
    EXPECT_EQ(j["d_p"], 2);
  }

  TEST(Persistence, SnapshotsDefaultWeightsAndMassMatrix)
  {
    TempDir tmp;
    const fs::path dir = tmp / "hand";
    io::write_text(dir / "points.csv", "0\n0.5\n1\n");
    io::write_text(dir / "values.csv", "1,2,3\n4,5,6\n");
    io::write_text(dir / "mass.csv", "4,0\n0,9\n");
    nlohmann::json j = {{"schema_version", "1"}, {"kind", "snapshots"}, {"name", "hand"}, {"N", 2}, {"M", 3},
        {"d_p", 1}, {"points_file", "points.csv"}, {"values_file", "values.csv"}, {"layout", "column-major-csv"},
        {"mass_matrix_file", "mass.csv"}};
    io::write_text(dir / "manifest.json", j.dump());
    const auto s = io::load_snapshots(dir);
    EXPECT_EQ(s.grid().weights(), VectorXd::Constant(3, 1.0 / 3.0));
    EXPECT_EQ(s.values(), (MatrixXd(2, 3) << 2, 4, 6, 12, 15, 18).finished());
  }

  TEST(Persistence, ManifestChecks)
  {
    std::mt19937_64 rng(103);
    const auto s = random_snapshots(rng, 3, 3);
    TempDir tmp;
    EXPECT_THROW(io::load_snapshots(tmp / "missing"), FormatError);

    const fs::path dir = tmp / "s";
    io::save_snapshots(s, dir);
    auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    const std::string good = j.dump();

    std::string text = slurp(dir / "values.csv");
    text[0] = text[0] == '1' ? '2' : '1';
    io::write_text(dir / "values.csv", text);
    EXPECT_THROW(io::load_snapshots(dir), HashMismatchError);
    io::save_snapshots(s, dir);

    j["schema_version"] = "2";
    io::write_text(dir / "manifest.json", j.dump());
    EXPECT_THROW(io::load_snapshots(dir), FormatError);

    j = nlohmann::json::parse(good);
    j["kind"] = "model";
    io::write_text(dir / "manifest.json", j.dump());
    EXPECT_THROW(io::load_snapshots(dir), FormatError);

    io::write_text(dir / "manifest.json", good);
    fs::remove(dir / "weights.csv");
    EXPECT_THROW(io::load_snapshots(dir), FormatError);
  }

  TEST(Persistence, ModelRoundTrip)
  {
    std::mt19937_64 rng(104);
    const auto s = random_snapshots(rng, 6, 5);
    const auto rm = truncate(full_model(decompose(s), s), {3, std::nullopt});
    TempDir tmp;
    io::save_model(rm, tmp / "m");
    const auto back = io::load_model(tmp / "m");
    EXPECT_EQ(back.spectral.eigenvalues, rm.spectral.eigenvalues);
    EXPECT_EQ(back.spectral.spatial_modes, rm.spectral.spatial_modes);
    EXPECT_EQ(back.spectral.parameter_modes, rm.spectral.parameter_modes);
    EXPECT_EQ(back.spectral.grid.points(), rm.spectral.grid.points());
    EXPECT_EQ(back.tail_energy, rm.tail_energy);
    EXPECT_EQ(back.truncation_rank, 3);
    EXPECT_EQ(back.source_hash, fingerprint(s));
    const auto first = snapshot_dir(tmp / "m");
    io::save_model(back, tmp / "m");
    EXPECT_EQ(snapshot_dir(tmp / "m"), first);

    const auto zero = truncate(decompose(s), {0, std::nullopt});
    io::save_model(zero, tmp / "z");
    EXPECT_EQ(io::load_model(tmp / "z").truncation_rank, 0);
  }

  TEST(Persistence, FactorRoundTrip)
  {
    std::mt19937_64 rng(105);
    const CorrelationMatrix c(random_psd(rng, 4, 2));
    const auto b = cholesky_factor(c);
    TempDir tmp;
    io::save_factor(b, tmp / "f");
    const auto back = io::load_factor(tmp / "f");
    EXPECT_EQ(back.matrix, b.matrix);
    EXPECT_EQ(back.kind, FactorKind::cholesky);
    EXPECT_EQ(back.correlation_hash, fingerprint(c));
  }

  TEST(Persistence, TensorAndTtRoundTrip)
  {
    std::mt19937_64 rng(106);
    const VectorXd v = random_vector(rng, 60);
    const FullTensor t({3, 4, 5}, std::vector<double>(v.data(), v.data() + 60));
    TempDir tmp;
    io::save_tensor(t, tmp / "t");
    const auto tb = io::load_tensor(tmp / "t");
    EXPECT_EQ(tb.dims(), t.dims());
    EXPECT_EQ(tb.data(), t.data());

    const auto tt = tt_decompose(t, {0.3, std::nullopt, kRankCutoff});
    io::save_tt(tt, tmp / "tt");
    const auto back = io::load_tt(tmp / "tt");
    ASSERT_EQ(back.order(), tt.order());
    for (Index k = 0; k < tt.order(); ++k) EXPECT_EQ(back.cores[k].data, tt.cores[k].data);
    EXPECT_EQ(back.discarded, tt.discarded);
    const auto j = nlohmann::json::parse(slurp(tmp / "tt" / "tt.json"));
    EXPECT_EQ(j["ranks"].get<std::vector<Index>>(), tt.ranks());
  }

  TEST(Persistence, DensityRoundTrip)
  {
    const auto d = spectral_density(StationaryKernel1D::builtin("exp", 1.0, 10.0, 32));
    TempDir tmp;
    io::save_density(d, tmp / "d.csv");
    const auto back = io::load_density(tmp / "d.csv");
    EXPECT_EQ(back.values, d.values);
    EXPECT_EQ(back.spacing, d.spacing);
    EXPECT_EQ(back.max_clamped, d.max_clamped);
    const MatrixXd rows = csv::read(tmp / "d.csv");
    EXPECT_EQ(rows(1, 0), d.frequency(1));
  }

  TEST(Persistence, FeaturesAndSpdRoundTrip)
  {
    std::mt19937_64 rng(107);
    const ParameterGrid grid(random_points(rng, 4, 1), random_weights(rng, 4));
    const FeatureMapSamples f(random_matrix(rng, 4, 3), random_weights(rng, 3));
    TempDir tmp;
    io::save_features(f, grid, tmp / "feat");
    const auto fb = io::load_features(tmp / "feat");
    EXPECT_EQ(fb.features.g_matrix(), f.g_matrix());
    EXPECT_EQ(fb.features.x_weights(), f.x_weights());
    EXPECT_EQ(fb.grid.weights(), grid.weights());

    std::vector<MatrixXd> mats;
    for (int j = 0; j < 4; ++j) mats.push_back(random_psd(rng, 3, 3) + MatrixXd::Identity(3, 3));
    const SPDFieldSet spd(mats);
    for (auto layout : {io::SpdLayout::single_csv, io::SpdLayout::per_sample})
    {
      const fs::path dir = tmp / (layout == io::SpdLayout::single_csv ? "spd1" : "spd2");
      io::save_spd_field(spd, grid, dir, layout, "tensor-field");
      const auto back = io::load_spd_field(dir);
      for (int j = 0; j < 4; ++j) EXPECT_EQ(back.field.matrices()[j], mats[j]);
      EXPECT_EQ(back.name, "tensor-field");
    }

    const auto r = spd_field_reduce(spd, grid, 2);
    io::save_spd_model(r, tmp / "spdm");
    const auto rb = io::load_spd_model(tmp / "spdm");
    EXPECT_EQ(rb.mean, r.mean);
    EXPECT_EQ(rb.centered, r.centered);
    EXPECT_EQ(rb.model.spectral.spatial_modes, r.model.spectral.spatial_modes);
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(rb.evaluate(j), r.evaluate(j));
    const auto j = nlohmann::json::parse(slurp(tmp / "spdm" / "model.json"));
    EXPECT_EQ(j["spd"]["centered"], true);
  }

  TEST(Report, CumulativeFraction)
  {
    const auto rows = spectrum_report(Eigen::Vector3d(4, 1, 0.25));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].m, 1);
    EXPECT_DOUBLE_EQ(rows[0].singular_value, 2.0);
    EXPECT_NEAR(rows[0].cumulative_fraction, 4.0 / 5.25, 1e-15);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].cumulative_fraction, rows[i - 1].cumulative_fraction);
    EXPECT_NEAR(rows.back().cumulative_fraction, 1.0, 1e-12);
    const std::string text = spectrum_csv(rows);
    EXPECT_EQ(text.substr(0, text.find('\n')), "m,lambda,sigma,cumulative_fraction");
    EXPECT_NE(spectrum_svg(rows, "t").find("<svg"), std::string::npos);
    EXPECT_TRUE(spectrum_report(VectorXd(0)).empty());
  }
}  // namespace
