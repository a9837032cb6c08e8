#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "carnoq/generators.hpp"
#include "carnoq/geodesic.hpp"
#include "carnoq/homcurves.hpp"
#include "carnoq/io.hpp"
#include "carnoq/verify.hpp"

namespace {

using namespace carnoq;

struct RangeSpec {
  double start = 0.0;
  double end = 2.0 * std::numbers::pi;
  int samples = 101;
};

RangeSpec parse_range(const std::string& text) {
  RangeSpec range;
  std::stringstream ss(text);
  std::string a, b, n;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, n, ':')) {
    throw CLI::ValidationError("--range", "expected start:end:samples");
  }
  try {
    range.start = std::stod(a);
    range.end = std::stod(b);
    range.samples = std::stoi(n);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--range", "expected numeric start:end:samples");
  }
  if (range.samples < 2) throw CLI::ValidationError("--range", "need at least 2 samples");
  if (!(range.start < range.end)) throw CLI::ValidationError("--range", "need start < end");
  return range;
}

Vector range_grid(const RangeSpec& range) {
  Vector s(range.samples);
  for (int i = 0; i < range.samples; ++i) {
    s[i] = range.start +
           (range.end - range.start) * static_cast<double>(i) / (range.samples - 1);
  }
  return s;
}

void add_tolerance_flags(CLI::App* app, Tolerances& tol) {
  app->add_option("--tol-skew", tol.skew_tol, "skew-symmetry tolerance (relative)");
  app->add_option("--tol-ortho", tol.ortho_tol, "orthogonality tolerance");
  app->add_option("--tol-block", tol.block_tol, "block reconstruction tolerance");
  app->add_option("--tol-poly", tol.poly_tol, "polynomial trim tolerance");
  app->add_option("--tol-freq-floor", tol.freq_floor, "zero-frequency floor");
  app->add_option("--tol-freq-sep", tol.freq_sep, "frequency separation tolerance");
  app->add_option("--tol-amp", tol.amp_tol, "active-amplitude threshold (relative)");
  app->add_option("--tol-fit", tol.fit_tol, "sample-fit RMS tolerance");
  app->add_option("--tol-dep", tol.dep_tol, "linear-dependence tolerance");
  app->add_option("--tol-rat", tol.rat_tol, "rationality tolerance");
  app->add_option("--tol-rat-denom", tol.rat_denom_bound, "rationality denominator bound");
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Matrix& data) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot open " + path + " for writing");
  write_csv(os, header, data);
}

Json injectivity_json(const InjectivityResult& r) {
  Json j;
  switch (r.verdict) {
    case Injectivity::injective: j["verdict"] = "injective"; break;
    case Injectivity::non_injective: j["verdict"] = "non_injective"; break;
    case Injectivity::inconclusive: j["verdict"] = "inconclusive"; break;
  }
  if (r.period) j["period"] = *r.period;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

int cmd_gamma(int m, const RangeSpec& range, const std::string& out) {
  const Vector s = range_grid(range);
  Matrix data(s.size(), m + 2);
  std::vector<std::string> header{"s"};
  for (int j = 0; j <= m; ++j) header.push_back("g" + std::to_string(j));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    data(i, 0) = s[i];
    data.row(i).tail(m + 1) = gamma_m_eval(m, s[i]).transpose();
  }
  write_csv_file(out, header, data);
  return 0;
}

int cmd_geodesic(const std::string& algebra_path, const std::string& ivp_path,
                 const RangeSpec& range, const std::string& out, const Tolerances& tol) {
  const StratifiedAlgebra2 g = algebra_from_json(load_json_file(algebra_path), tol);
  const GeodesicIVP ivp = ivp_from_json(load_json_file(ivp_path));
  const NormalGeodesic geo = geodesic_closed_form(g, ivp, tol);
  if (geo.kind() == NormalGeodesic::Kind::mixed) {
    std::cerr << "warning: SingularATau: the momentum generator is singular but nonzero; "
                 "using the split rotational/straight solution\n";
  }
  const Vector s = range_grid(range);
  std::vector<std::string> header{"s"};
  for (Eigen::Index i = 1; i <= g.m; ++i) header.push_back("x" + std::to_string(i));
  for (Eigen::Index i = 1; i <= g.p; ++i) header.push_back("t" + std::to_string(i));
  for (Eigen::Index i = 1; i <= g.m; ++i) header.push_back("xi" + std::to_string(i));
  header.push_back("H");
  Matrix data(s.size(), 2 + 2 * g.m + g.p);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const PhaseState st = geo.state(s[i]);
    data(i, 0) = s[i];
    data.row(i).segment(1, g.m) = st.x.transpose();
    data.row(i).segment(1 + g.m, g.p) = st.t.transpose();
    data.row(i).segment(1 + g.m + g.p, g.m) = st.xi.transpose();
    data(i, 1 + 2 * g.m + g.p) = hamiltonian(g, st);
  }
  write_csv_file(out, header, data);
  return 0;
}

int cmd_decompose(const std::string& in, const std::string& samples, int max_freqs,
                  const std::string& out, const Tolerances& tol) {
  Json report;
  const EmbeddedQ0* embedded = nullptr;
  EmbeddedQ0 storage;
  if (!samples.empty()) {
    std::ifstream is(samples);
    if (!is) throw Error(Errc::io, "cannot open " + samples);
    const CsvTable table = read_csv(is);
    if (table.data.cols() < 2) {
      throw Error(Errc::schema, "samples need an s column plus at least one component");
    }
    std::vector<double> s(table.data.rows());
    for (Eigen::Index i = 0; i < table.data.rows(); ++i) s[static_cast<std::size_t>(i)] = table.data(i, 0);
    const Matrix points = table.data.rightCols(table.data.cols() - 1);
    FitResult fit = fit_from_samples(s, points, max_freqs, tol);
    report["rms"] = fit.rms;
    storage = std::move(fit.embedded);
    embedded = &storage;
  } else {
    const Json j = load_json_file(in);
    const SkewMatrix a(matrix_from_json(j.contains("A") ? j.at("A") : j), tol);
    const Vector u0 = vector_from_json(j.contains("u0") ? j.at("u0") : Json::array());
    storage = decompose(a, u0, tol);
    embedded = &storage;
  }
  report["decomposition"] = to_json(embedded->decomposition);
  report["curve"] = to_json(embedded->curve);
  report["injectivity"] = injectivity_json(is_injective(embedded->decomposition, tol));
  save_json_file(out, report);
  return 0;
}

int cmd_correspond(const std::string& mode, const std::string& in, const std::string& out,
                   bool check, const Tolerances& tol) {
  const Json input = load_json_file(in);
  Json output;
  double residual = 0.0;
  if (mode == "helical-to-group") {
    const HelicalCR h = helical_from_json(input, tol);
    const ContactEmbedding ce = helical_to_algebra(h, tol);
    output["algebra"] = to_json(ce.algebra);
    output["vertical_axis"] = to_json(ce.vertical_axis);
    output["vertical_norm"] = ce.vertical_norm;
    if (check) {
      const HelicalFromAlgebra back = algebra_to_helical(ce.algebra, h.w, tol);
      const EquivalenceResult eq = equivalent(h, back.helical, tol);
      if (!eq.equivalent) throw Error(Errc::fit_failed, "round-trip is not equivalent");
      residual = std::abs(eq.lambda - 1.0);
      output["check"] = Json{{"lambda", eq.lambda}, {"residual", residual}};
    }
  } else if (mode == "group-to-helical") {
    const StratifiedAlgebra2 g = algebra_from_json(input.at("algebra"), tol);
    const Vector w = vector_from_json(input.at("w"));
    const HelicalFromAlgebra hfa = algebra_to_helical(g, w, tol);
    output["helical"] = to_json(hfa.helical);
    output["horizontal_embedding"] = to_json(hfa.horizontal_embedding);
    if (check) {
      const Matrix rebuilt = hfa.horizontal_embedding * hfa.helical.A.matrix() *
                             hfa.horizontal_embedding.transpose();
      residual = (rebuilt - g.C.front().matrix()).cwiseAbs().maxCoeff();
      output["check"] = Json{{"residual", residual}};
    }
  } else if (mode == "tuple-to-group") {
    std::vector<Q1Curve> curves;
    for (const Json& c : input.at("curves")) curves.push_back(q1_from_json(c, tol));
    const AssembledTuple assembled = assemble_from_tuple(curves, tol);
    output["algebra"] = to_json(assembled.algebra);
    output["vertical_basis"] = to_json(assembled.vertical_basis);
    Json geos = Json::array();
    for (const GeodesicIVP& ivp : assembled.geodesics) geos.push_back(to_json(ivp));
    output["geodesics"] = std::move(geos);
    if (check) {
      const std::vector<Q1Curve> back =
          algebra_to_tuple(assembled.algebra, assembled.geodesics, tol);
      for (std::size_t i = 0; i < back.size(); ++i) {
        residual = std::max(residual, (back[i].structure.A.matrix() -
                                       curves[i].structure.A.matrix()).cwiseAbs().maxCoeff());
        residual = std::max(residual, (back[i].v - curves[i].v).cwiseAbs().maxCoeff());
      }
      output["check"] = Json{{"residual", residual}};
    }
  } else if (mode == "group-to-tuple") {
    const StratifiedAlgebra2 g = algebra_from_json(input.at("algebra"), tol);
    std::vector<GeodesicIVP> ivps;
    for (const Json& j : input.at("geodesics")) ivps.push_back(ivp_from_json(j));
    const std::vector<Q1Curve> curves = algebra_to_tuple(g, ivps, tol);
    Json arr = Json::array();
    for (const Q1Curve& c : curves) arr.push_back(to_json(c));
    output["curves"] = std::move(arr);
    if (check) {
      const AssembledTuple back = assemble_from_tuple(curves, tol);
      for (Eigen::Index a = 0; a < g.p; ++a) {
        residual = std::max(residual, (back.algebra.C[static_cast<std::size_t>(a)].matrix() -
                                       g.C[static_cast<std::size_t>(a)].matrix())
                                          .cwiseAbs()
                                          .maxCoeff());
      }
      output["check"] = Json{{"residual", residual}};
    }
  } else {
    throw CLI::ValidationError("--mode", "unknown mode " + mode);
  }
  if (check && residual > 1e-9) {
    throw Error(Errc::fit_failed, "round-trip residual " + format_double(residual) +
                                      " exceeds 1e-9");
  }
  save_json_file(out, output);
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::string& out, const std::string& which,
               const Tolerances& tol) {
  std::vector<SuiteResult> results;
  if (which == "invariants" || which == "all") {
    const auto inv = run_invariant_suites(seed, tol);
    results.insert(results.end(), inv.begin(), inv.end());
  }
  if (which == "acceptance" || which == "all") {
    const auto acc = run_acceptance_criteria(seed, tol);
    results.insert(results.end(), acc.begin(), acc.end());
  }
  const std::string report = format_report(results);
  std::cout << report;
  if (!out.empty()) save_text_file(out, report);
  return all_pass(results) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helical curves, step-two Carnot groups, and their normal geodesics"};
  app.require_subcommand(1);
  Tolerances tol;

  // gamma
  auto* gamma = app.add_subcommand("gamma", "sample the homogeneous spherical curve");
  int gamma_m_arg = 1;
  std::string gamma_range = "0:6.283185307179586:101";
  std::string gamma_out = "gamma.csv";
  gamma->add_option("-m,--degree", gamma_m_arg, "curve degree")->required();
  gamma->add_option("--range", gamma_range, "sampling range start:end:samples");
  gamma->add_option("--out", gamma_out, "output CSV path");
  add_tolerance_flags(gamma, tol);

  // geodesic
  auto* geod = app.add_subcommand("geodesic", "evaluate a normal geodesic in closed form");
  std::string geo_algebra, geo_ivp;
  std::string geo_range = "0:6.283185307179586:101";
  std::string geo_out = "geodesic.csv";
  geod->add_option("--algebra", geo_algebra, "algebra JSON path")->required();
  geod->add_option("--ivp", geo_ivp, "initial data JSON path")->required();
  geod->add_option("--range", geo_range, "sampling range start:end:samples");
  geod->add_option("--out", geo_out, "output CSV path");
  add_tolerance_flags(geod, tol);

  // decompose
  auto* dec = app.add_subcommand("decompose", "canonical decomposition of a constant-norm curve");
  std::string dec_in, dec_samples;
  std::string dec_out = "decomposition.json";
  int dec_max_freqs = 6;
  dec->add_option("--in", dec_in, "JSON with {\"A\": matrix, \"u0\": [...]}");
  dec->add_option("--samples", dec_samples, "CSV of samples (s, components)");
  dec->add_option("--max-freqs", dec_max_freqs, "maximum number of fitted frequencies");
  dec->add_option("--out", dec_out, "output JSON path");
  add_tolerance_flags(dec, tol);

  // correspond
  auto* cor = app.add_subcommand("correspond", "run one of the structure correspondences");
  std::string cor_mode, cor_in;
  std::string cor_out = "correspond.json";
  bool cor_check = false;
  cor->add_option("--mode", cor_mode,
                  "helical-to-group | group-to-helical | tuple-to-group | group-to-tuple")
      ->required();
  cor->add_option("--in", cor_in, "input JSON path")->required();
  cor->add_option("--out", cor_out, "output JSON path");
  cor->add_flag("--check", cor_check, "verify the round-trip residual");
  add_tolerance_flags(cor, tol);

  // verify
  auto* ver = app.add_subcommand("verify", "run the verification suites");
  std::uint64_t ver_seed = 42;
  std::string ver_out;
  std::string ver_which = "invariants";
  ver->add_option("--seed", ver_seed, "random seed");
  ver->add_option("--out", ver_out, "report output path");
  ver->add_option("--suite", ver_which, "invariants | acceptance | all");
  add_tolerance_flags(ver, tol);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gamma->parsed()) {
      if (gamma_m_arg < 0) throw Error(Errc::invalid_argument, "degree must be >= 0");
      return cmd_gamma(gamma_m_arg, parse_range(gamma_range), gamma_out);
    }
    if (geod->parsed()) {
      return cmd_geodesic(geo_algebra, geo_ivp, parse_range(geo_range), geo_out, tol);
    }
    if (dec->parsed()) {
      if (dec_in.empty() == dec_samples.empty()) {
        std::cerr << "decompose needs exactly one of --in or --samples\n";
        return 1;
      }
      return cmd_decompose(dec_in, dec_samples, dec_max_freqs, dec_out, tol);
    }
    if (cor->parsed()) {
      return cmd_correspond(cor_mode, cor_in, cor_out, cor_check, tol);
    }
    if (ver->parsed()) {
      return cmd_verify(ver_seed, ver_out, ver_which, tol);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
