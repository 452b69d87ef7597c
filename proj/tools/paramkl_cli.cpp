// paramkl command-line driver. Every subcommand fronts one library operation.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include "paramkl/csv.hpp"
#include "paramkl/error.hpp"
#include "paramkl/io.hpp"
#include "paramkl/log.hpp"
#include "paramkl/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace paramkl;

namespace
{

/// Parameters echoed to stderr so runs can be reproduced.
void echo(const std::string& command, const std::vector<std::pair<std::string, std::string>>& params)
{
  if (log::level() == log::Level::error) return;
  std::ostringstream line;
  line << "paramkl " << command << ":";
  for (const auto& [k, v] : params) line << ' ' << k << '=' << v;
  std::cerr << line.str() << '\n';
}

std::string num(double v) { return csv::format_double(v); }
std::string num(Index v) { return std::to_string(v); }

void write_json(const fs::path& file, const nlohmann::json& j) { io::write_text(file, j.dump(2) + "\n"); }

struct DecomposeArgs
{
  std::string input, out, method = "snapshots";
  double rank_cutoff = kRankCutoff;
};

int run_decompose(const DecomposeArgs& a)
{
  echo("decompose", {{"input", a.input}, {"out", a.out}, {"method", a.method},
                        {"rank_cutoff", num(a.rank_cutoff)}});
  const SnapshotSet s = io::load_snapshots(a.input);
  DecomposeOptions opt;
  opt.rank_cutoff = a.rank_cutoff;
  opt.method = a.method == "correlation" ? DecompositionMethod::correlation
                                         : DecompositionMethod::snapshots;
  const SpectralData sd = decompose(s, opt);
  const auto rep = check_invariants(sd, s);
  log::info("rank " + std::to_string(sd.rank()) + ", orthonormality " +
            num(std::max(rep.spatial_orthonormality, rep.parameter_orthonormality)) +
            ", svd consistency " + num(rep.svd_consistency));
  if (!rep.ok()) log::warn("spectral invariants exceed tolerance (ill-conditioned spectrum)");
  io::save_model(full_model(sd, s), a.out);
  return 0;
}

struct TruncateArgs
{
  std::string model, out;
  std::optional<Index> rank;
  std::optional<double> tol;
};

int run_truncate(const TruncateArgs& a)
{
  echo("truncate", {{"model", a.model}, {"out", a.out},
                       {"rank", a.rank ? num(*a.rank) : "-"}, {"tol", a.tol ? num(*a.tol) : "-"}});
  const ReducedModel rm = io::load_model(a.model);
  const ReducedModel small = truncate(rm, TruncationRule{a.rank, a.tol});
  if (small.rank_clamped) log::warn("requested rank exceeds the model rank; clamped");
  log::info("kept " + std::to_string(small.truncation_rank) + " modes, tail energy " +
            num(small.tail_energy));
  io::save_model(small, a.out);
  return 0;
}

struct EvalArgs
{
  std::string model, out;
  Index index = 0;
};

int run_eval(const EvalArgs& a)
{
  echo("eval", {{"model", a.model}, {"index", num(a.index)}, {"out", a.out.empty() ? "-" : a.out}});
  const ReducedModel rm = io::load_model(a.model);
  const std::string text = csv::to_string(evaluate(rm, a.index));
  if (a.out.empty())
    std::cout << text;
  else
    io::write_text(a.out, text);
  return 0;
}

struct KernelEigArgs
{
  std::string kernel = "brownian", input, out;
  double scale = 1.0;
  Index points = 200, dim = 1, count = 10;
};

int run_kernel_eig(const KernelEigArgs& a)
{
  echo("kernel-eig", {{"kernel", a.kernel}, {"scale", num(a.scale)}, {"points", num(a.points)},
                         {"dim", num(a.dim)}, {"count", num(a.count)},
                         {"input", a.input.empty() ? "-" : a.input}, {"out", a.out}});
  std::optional<SnapshotSet> snaps;
  if (!a.input.empty()) snaps = io::load_snapshots(a.input);
  const ParameterGrid grid = snaps ? snaps->grid() : ParameterGrid::midpoint(a.points, a.dim);

  NystromResult res = [&] {
    if (a.kernel == "snapshot")
    {
      if (!snaps) throw InvalidArgument("--kernel snapshot needs --input");
      return nystrom_eigensolve(kernel_gram(*snaps).entries(), grid, std::min(a.count, grid.size()));
    }
    return nystrom_eigensolve(KernelFunction::builtin(a.kernel, a.scale), grid, a.count);
  }();
  if (res.clamped_negative) log::warn("slightly negative eigenvalues were clamped to zero");

  const fs::path out(a.out);
  csv::write(out / "eigenvalues.csv", res.eigenvalues);
  csv::write(out / "eigenfunctions.csv", res.eigenfunctions);
  csv::write(out / "points.csv", grid.points());
  csv::write(out / "weights.csv", grid.weights());
  nlohmann::json j;
  j["kind"] = "kernel_eig";
  j["kernel"] = a.kernel;
  j["scale"] = a.scale;
  j["M"] = grid.size();
  j["count"] = res.eigenvalues.size();
  j["clamped_negative"] = res.clamped_negative;
  j["schema_version"] = io::kSchemaVersion;
  const std::vector<std::string> files = {"eigenvalues.csv", "eigenfunctions.csv", "points.csv", "weights.csv"};
  j["files"] = files;
  j["sha256"] = io::content_hash(out, files);
  write_json(out / "nystrom.json", j);
  return 0;
}

struct FeatureArgs
{
  std::string input, snapshots, out;
};

int run_feature(const FeatureArgs& a)
{
  echo("feature", {{"input", a.input}, {"snapshots", a.snapshots.empty() ? "-" : a.snapshots},
                      {"out", a.out}});
  const auto in = io::load_features(a.input);
  std::optional<SnapshotSet> snaps;
  if (!a.snapshots.empty()) snaps = io::load_snapshots(a.snapshots);
  const auto ff = feature_factorize(in.features, in.grid, snaps ? &*snaps : nullptr);

  const fs::path out(a.out);
  std::vector<std::string> files = {"kernel.csv", "eigenvalues.csv", "parameter_modes.csv",
      "chi.csv", "feature_eigenvalues.csv"};
  csv::write(out / "kernel.csv", ff.kernel);
  csv::write(out / "eigenvalues.csv", ff.eigenvalues);
  csv::write(out / "parameter_modes.csv", ff.parameter_modes);
  csv::write(out / "chi.csv", ff.chi_modes);
  csv::write(out / "feature_eigenvalues.csv", ff.feature_eigenvalues);
  if (ff.spatial_modes)
  {
    csv::write(out / "spatial_modes.csv", *ff.spatial_modes);
    csv::write(out / "representation.csv", ff.reconstruct_features());
    files.push_back("spatial_modes.csv");
    files.push_back("representation.csv");
  }
  nlohmann::json j;
  j["kind"] = "feature_factorization";
  j["M"] = in.grid.size();
  j["L"] = in.features.feature_count();
  j["rank"] = ff.eigenvalues.size();
  j["spectrum_discrepancy"] = ff.spectrum_discrepancy;
  j["schema_version"] = io::kSchemaVersion;
  j["files"] = files;
  j["sha256"] = io::content_hash(out, files);
  write_json(out / "feature.json", j);
  return 0;
}

struct StationaryArgs
{
  std::string kernel = "exp", out;
  double scale = 1.0, length = 40.0;
  Index points = 4096;
};

int run_stationary(const StationaryArgs& a)
{
  echo("stationary", {{"kernel", a.kernel}, {"scale", num(a.scale)}, {"length", num(a.length)},
                         {"points", num(a.points)}, {"out", a.out}});
  const auto k = StationaryKernel1D::builtin(a.kernel, a.scale, a.length, a.points);
  const auto d = spectral_density(k);
  if (!d.admissible()) log::warn("kernel is not admissible on this grid");
  io::save_density(d, a.out);
  return 0;
}

struct SynthesizeArgs
{
  std::string density, out;
  Index count = 1;
  std::uint64_t seed = 0;
};

int run_synthesize(const SynthesizeArgs& a)
{
  echo("synthesize", {{"density", a.density}, {"count", num(a.count)},
                         {"seed", std::to_string(a.seed)}, {"out", a.out}});
  const auto d = io::load_density(a.density);
  csv::write(a.out, synthesize_realizations(d, a.count, a.seed));
  return 0;
}

struct TTArgs
{
  std::string input, out;
  double tol = 0;
  std::optional<Index> max_rank;
  std::vector<Index> index;
};

int run_tt_compress(const TTArgs& a)
{
  echo("tt compress", {{"input", a.input}, {"tol", num(a.tol)},
                          {"max_rank", a.max_rank ? num(*a.max_rank) : "-"}, {"out", a.out}});
  const FullTensor t = io::load_tensor(a.input);
  TTOptions opt;
  opt.tolerance = a.tol;
  opt.max_rank = a.max_rank;
  const auto tt = tt_decompose(t, opt);
  std::string ranks;
  for (Index r : tt.ranks()) ranks += (ranks.empty() ? "" : ",") + std::to_string(r);
  log::info("tt ranks " + ranks + ", error bound " + num(tt_error_bound(tt.discarded)));
  io::save_tt(tt, a.out);
  return 0;
}

int run_tt_eval(const TTArgs& a)
{
  std::string idx;
  for (Index i : a.index) idx += (idx.empty() ? "" : ",") + std::to_string(i);
  echo("tt eval", {{"input", a.input}, {"index", idx}});
  const auto tt = io::load_tt(a.input);
  std::cout << csv::format_double(tt_eval(tt, a.index)) << '\n';
  return 0;
}

int run_tt_reconstruct(const TTArgs& a)
{
  echo("tt reconstruct", {{"input", a.input}, {"out", a.out}});
  io::save_tensor(tt_reconstruct(io::load_tt(a.input)), a.out);
  return 0;
}

struct SpdArgs
{
  std::string input, out;
  Index rank = 1;
  bool no_center = false;
  std::optional<Index> index;
};

int run_spd_field(const SpdArgs& a)
{
  echo("spd-field", {{"input", a.input}, {"rank", num(a.rank)},
                        {"center", a.no_center ? "false" : "true"}, {"out", a.out},
                        {"index", a.index ? num(*a.index) : "-"}});
  const auto in = io::load_spd_field(a.input);
  const auto reduced = spd_field_reduce(in.field, in.grid, a.rank, !a.no_center);
  if (reduced.model.rank_clamped) log::warn("requested rank exceeds the numerical rank; clamped");
  io::save_spd_model(reduced, a.out);
  if (a.index) std::cout << csv::to_string(reduced.evaluate(*a.index));
  return 0;
}

struct ReportArgs
{
  std::string model, out, svg;
};

int run_report(const ReportArgs& a)
{
  const fs::path svg_path = a.svg.empty() ? fs::path(a.out).replace_extension(".svg") : fs::path(a.svg);
  echo("report", {{"model", a.model}, {"out", a.out}, {"svg", svg_path.string()}});
  const ReducedModel rm = io::load_model(a.model);
  const auto rows = spectrum_report(rm.spectral.eigenvalues);
  io::write_text(a.out, spectrum_csv(rows));
  io::write_text(svg_path, spectrum_svg(rows, rm.source_name.empty() ? "Spectrum decay" : rm.source_name));
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"paramkl: spectral analysis and reduction of sampled parametric models"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "Karhunen-Loeve decomposition of a snapshot set");
  c_dec->add_option("--input", dec.input, "snapshot directory")->required();
  c_dec->add_option("--out", dec.out, "model output directory")->required();
  c_dec->add_option("--method", dec.method, "snapshots (M x M) or correlation (N x N)")
      ->check(CLI::IsMember({"snapshots", "correlation"}));
  c_dec->add_option("--rank-cutoff", dec.rank_cutoff, "relative eigenvalue cutoff")
      ->check(CLI::NonNegativeNumber);

  TruncateArgs tr;
  auto* c_tr = app.add_subcommand("truncate", "best n-term truncation of a model");
  c_tr->add_option("--model", tr.model, "model directory")->required();
  c_tr->add_option("--out", tr.out, "output model directory")->required();
  auto* g_rule = c_tr->add_option_group("rule", "truncation rule");
  g_rule->add_option("--rank", tr.rank, "number of modes to keep")->check(CLI::NonNegativeNumber);
  g_rule->add_option("--tol", tr.tol, "relative tail tolerance tau")->check(CLI::NonNegativeNumber);
  g_rule->require_option(1);

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "evaluate a model at a grid index");
  c_ev->add_option("--model", ev.model, "model directory")->required();
  c_ev->add_option("--index", ev.index, "grid index")->required()->check(CLI::NonNegativeNumber);
  c_ev->add_option("--out", ev.out, "output CSV (default: stdout)");

  KernelEigArgs ke;
  auto* c_ke = app.add_subcommand("kernel-eig", "Nystrom eigenpairs of a kernel");
  c_ke->add_option("--kernel", ke.kernel, "brownian, exp, gauss or snapshot")
      ->check(CLI::IsMember({"brownian", "exp", "gauss", "snapshot"}));
  c_ke->add_option("--scale", ke.scale, "kernel scale a")->check(CLI::PositiveNumber);
  c_ke->add_option("--points", ke.points, "midpoint nodes per axis on [0,1]")->check(CLI::PositiveNumber);
  c_ke->add_option("--dim", ke.dim, "parameter dimension of the midpoint grid")->check(CLI::PositiveNumber);
  c_ke->add_option("--count", ke.count, "number of eigenpairs")->check(CLI::NonNegativeNumber);
  c_ke->add_option("--input", ke.input, "snapshot directory supplying the grid (and kernel)");
  c_ke->add_option("--out", ke.out, "output directory")->required();

  FeatureArgs fe;
  auto* c_fe = app.add_subcommand("feature", "feature-map factorization of a kernel");
  c_fe->add_option("--input", fe.input, "feature sample directory")->required();
  c_fe->add_option("--snapshots", fe.snapshots, "snapshot directory for the re-indexed KL table");
  c_fe->add_option("--out", fe.out, "output directory")->required();

  StationaryArgs st;
  auto* c_st = app.add_subcommand("stationary", "spectral density of a stationary kernel");
  c_st->add_option("--kernel", st.kernel, "exp or gauss")->check(CLI::IsMember({"exp", "gauss"}));
  c_st->add_option("--scale", st.scale, "kernel scale a")->check(CLI::PositiveNumber);
  c_st->add_option("--length", st.length, "period L")->check(CLI::PositiveNumber);
  c_st->add_option("--points", st.points, "grid points M")->check(CLI::PositiveNumber);
  c_st->add_option("--out", st.out, "density CSV")->required();

  SynthesizeArgs sy;
  auto* c_sy = app.add_subcommand("synthesize", "stationary random realizations");
  c_sy->add_option("--density", sy.density, "density CSV")->required();
  c_sy->add_option("--count", sy.count, "number of realizations")->check(CLI::PositiveNumber);
  c_sy->add_option("--seed", sy.seed, "random seed");
  c_sy->add_option("--out", sy.out, "samples CSV")->required();

  TTArgs tt;
  auto* c_tt = app.add_subcommand("tt", "tensor-train compression");
  c_tt->require_subcommand(1);
  auto* c_ttc = c_tt->add_subcommand("compress", "TT-SVD of a full tensor");
  c_ttc->add_option("--input", tt.input, "tensor directory")->required();
  c_ttc->add_option("--tol", tt.tol, "relative Frobenius tolerance")->check(CLI::NonNegativeNumber);
  c_ttc->add_option("--max-rank", tt.max_rank, "rank cap")->check(CLI::PositiveNumber);
  c_ttc->add_option("--out", tt.out, "TT directory")->required();
  auto* c_tte = c_tt->add_subcommand("eval", "evaluate a TT entry");
  c_tte->add_option("--input", tt.input, "TT directory")->required();
  c_tte->add_option("--index", tt.index, "comma-separated index")->required()->delimiter(',');
  auto* c_ttr = c_tt->add_subcommand("reconstruct", "expand a TT to a full tensor");
  c_ttr->add_option("--input", tt.input, "TT directory")->required();
  c_ttr->add_option("--out", tt.out, "tensor directory")->required();

  SpdArgs sp;
  auto* c_sp = app.add_subcommand("spd-field", "log-Euclidean reduction of an SPD field");
  c_sp->add_option("--input", sp.input, "SPD field directory")->required();
  c_sp->add_option("--rank", sp.rank, "truncation rank")->check(CLI::NonNegativeNumber);
  c_sp->add_flag("--no-center", sp.no_center, "do not subtract the log-mean");
  c_sp->add_option("--index", sp.index, "print the reduced matrix at this grid index");
  c_sp->add_option("--out", sp.out, "model directory")->required();

  ReportArgs rp;
  auto* c_rp = app.add_subcommand("report", "spectrum decay table and plot");
  c_rp->add_option("--model", rp.model, "model directory")->required();
  c_rp->add_option("--out", rp.out, "CSV output")->required();
  c_rp->add_option("--svg", rp.svg, "SVG output (default: CSV path with .svg)");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try
  {
    if (c_dec->parsed()) return run_decompose(dec);
    if (c_tr->parsed()) return run_truncate(tr);
    if (c_ev->parsed()) return run_eval(ev);
    if (c_ke->parsed()) return run_kernel_eig(ke);
    if (c_fe->parsed()) return run_feature(fe);
    if (c_st->parsed()) return run_stationary(st);
    if (c_sy->parsed()) return run_synthesize(sy);
    if (c_ttc->parsed()) return run_tt_compress(tt);
    if (c_tte->parsed()) return run_tt_eval(tt);
    if (c_ttr->parsed()) return run_tt_reconstruct(tt);
    if (c_sp->parsed()) return run_spd_field(sp);
    if (c_rp->parsed()) return run_report(rp);
  }
  catch (const std::exception& e)
  {
    log::error(e.what());
    return 2;
  }
  return 1;
}
