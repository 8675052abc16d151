// Command-line driver: dataset generation, triad ingestion, subspace
// analyses, Hessian-signature sweeps and the Euclidean PCA flag.
// Exit codes: 0 success, 2 validation error, 3 non-convergence.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bsa/experiments.hpp"

namespace {

bsa::ManifoldKind parse_manifold(const std::string& name, int dim) {
  if (name == "sphere") return bsa::ManifoldKind::sphere(dim);
  if (name == "hyperbolic") return bsa::ManifoldKind::hyperbolic(dim);
  if (name == "euclidean") return bsa::ManifoldKind::euclidean(dim);
  throw bsa::DomainError("unknown manifold: " + name);
}

nlohmann::json config_echo(const std::string& command,
                           const nlohmann::json& params) {
  nlohmann::json j;
  j["command"] = command;
  j["params"] = params;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barycentric subspace analysis on constant-curvature spaces"};
  app.require_subcommand(1);

  // generate equi
  auto* generate = app.add_subcommand("generate", "generate datasets");
  generate->require_subcommand(1);
  auto* equi = generate->add_subcommand(
      "equi", "noisy samples of an equilateral spherical triangle");
  int equi_n = 30, equi_ambient = 6;
  double equi_side_deg = 90.0, equi_sigma_deg = 10.0;
  std::uint64_t equi_seed = 0;
  std::string equi_out = "equi.csv";
  equi->add_option("--n", equi_n, "number of samples");
  equi->add_option("--ambient-dim", equi_ambient, "embedding dimension");
  equi->add_option("--side", equi_side_deg, "triangle side (degrees)");
  equi->add_option("--sigma", equi_sigma_deg, "noise level (degrees)");
  equi->add_option("--seed", equi_seed, "RNG seed");
  equi->add_option("--out", equi_out, "output CSV path");

  // ingest triads
  auto* ingest = app.add_subcommand("ingest", "ingest external data");
  ingest->require_subcommand(1);
  auto* triads = ingest->add_subcommand(
      "triads", "planar 3-landmark records to triangle shapes on S^2");
  std::string triads_in, triads_out = "shapes.csv";
  triads->add_option("--in", triads_in, "input triad CSV")->required();
  triads->add_option("--out", triads_out, "output dataset CSV");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "subspace analyses");
  std::string an_in, an_method = "fbs", an_out = "result.json";
  std::string an_curve;
  int an_k = 1;
  long long an_budget = 0;
  std::uint64_t an_seed = 0;
  analyze->add_option("--in", an_in, "dataset CSV")->required();
  analyze->add_option("--method", an_method, "fbs | pbs | bsa | pca-flag");
  analyze->add_option("--k", an_k, "subspace dimension");
  analyze->add_option("--budget", an_budget,
                      "max tuples (0 = exhaustive)");
  analyze->add_option("--seed", an_seed, "RNG seed for budgeted search");
  analyze->add_option("--out", an_out, "result JSON path");
  analyze->add_option("--curve-out", an_curve,
                      "per-level variance curve CSV path");

  // signature
  auto* signature = app.add_subcommand(
      "signature", "Hessian signature sweep over a 3-point configuration");
  std::string sig_manifold = "sphere", sig_refs, sig_out = "signature.csv";
  int sig_ni = 200, sig_nj = 100;
  double sig_box = 3.0;
  signature->add_option("--manifold", sig_manifold, "sphere | hyperbolic");
  signature->add_option("--refs", sig_refs,
                        "CSV with the 3 reference points")
      ->required();
  signature->add_option("--grid-i", sig_ni, "grid size, first axis");
  signature->add_option("--grid-j", sig_nj, "grid size, second axis");
  signature->add_option("--box", sig_box,
                        "half-width of the coordinate box (hyperbolic)");
  signature->add_option("--out", sig_out, "output CSV path");

  // pca-flag
  auto* pca = app.add_subcommand(
      "pca-flag", "Euclidean PCA flag with dual-route AUV");
  std::string pca_in, pca_out = "pca.json";
  int pca_k = 1;
  pca->add_option("--in", pca_in, "Euclidean dataset CSV")->required();
  pca->add_option("--k", pca_k, "flag order");
  pca->add_option("--out", pca_out, "result JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (equi->parsed()) {
      bsa::Dataset ds = bsa::generate_equi(
          equi_n, equi_ambient, equi_side_deg * bsa::kPi / 180.0,
          equi_sigma_deg * bsa::kPi / 180.0, equi_seed);
      bsa::save_dataset(equi_out, ds);
      std::cout << "wrote " << equi_out << " (" << ds.points.size()
                << " points on S^" << ds.manifold.dim << ")\n";
    } else if (triads->parsed()) {
      bsa::Dataset ds = bsa::load_triangle_data(triads_in);
      bsa::save_dataset(triads_out, ds);
      std::cout << "wrote " << triads_out << " (" << ds.points.size()
                << " shapes, scale x" << *ds.scale_tag << ")\n";
    } else if (analyze->parsed()) {
      bsa::Dataset ds = bsa::load_dataset(an_in);
      bsa::AnalysisRun run =
          bsa::run_analysis(ds, an_method, an_k, an_budget, an_seed);
      nlohmann::json j = bsa::result_to_json(run.result);
      if (run.auv_closed_form)
        j["auv_closed_form"] = *run.auv_closed_form;
      j["config"] = config_echo(
          "analyze", {{"in", an_in},
                      {"method", an_method},
                      {"k", an_k},
                      {"budget", an_budget},
                      {"seed", an_seed}});
      bsa::write_result(an_out, j);
      if (!an_curve.empty()) bsa::save_level_curve_csv(an_curve, run.result);
      std::cout << "auv = " << run.result.auv << ", wrote " << an_out
                << "\n";
    } else if (signature->parsed()) {
      bsa::Dataset refs_ds = bsa::load_dataset(sig_refs);
      if (refs_ds.points.size() != 3)
        throw bsa::DomainError("signature sweep needs exactly 3 references");
      bsa::ReferenceConfiguration refs(refs_ds.points);
      bsa::SignatureMap map =
          (sig_manifold == "hyperbolic")
              ? bsa::hyperbolic_signature_map(refs, sig_ni, sig_box)
              : bsa::sphere_signature_map(refs, sig_ni, sig_nj);
      bsa::save_signature_csv(sig_out, map);
      std::cout << "wrote " << sig_out << " ("
                << bsa::local_min_components(map)
                << " local-min components)\n";
    } else if (pca->parsed()) {
      bsa::Dataset ds = bsa::load_dataset(pca_in);
      bsa::AnalysisRun run = bsa::run_analysis(ds, "pca-flag", pca_k, 0, 0);
      nlohmann::json j = bsa::result_to_json(run.result);
      j["auv_closed_form"] = *run.auv_closed_form;
      j["config"] = config_echo("pca-flag", {{"in", pca_in}, {"k", pca_k}});
      bsa::write_result(pca_out, j);
      std::cout << "auv = " << run.result.auv
                << " (closed form " << *run.auv_closed_form << "), wrote "
                << pca_out << "\n";
    }
  } catch (const bsa::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
