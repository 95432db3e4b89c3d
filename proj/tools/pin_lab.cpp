// pin-lab: occupation spectra of harmonically interacting fermions and their
// distance to the generalized-Pauli polytope boundary.
//
// Subcommands: model, catalog, nons, pin, sweep, fit-weak. Exit codes:
// 0 success, 1 usage, 2 validation, 3 numerical failure.

#include "pinlab/gpc.hpp"
#include "pinlab/harmonium.hpp"
#include "pinlab/kernel.hpp"
#include "pinlab/polytope.hpp"
#include "pinlab/rdm.hpp"
#include "pinlab/report_io.hpp"
#include "pinlab/scalar.hpp"
#include "pinlab/spectrum.hpp"
#include "pinlab/svg.hpp"
#include "pinlab/weakfit.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace pinlab;

// Catalog resolution order: builtins, then PINLAB_CATALOG_PATH files sorted by
// name, then --catalog files in the order given. A later catalog for a setting
// already present replaces the earlier one in place.
std::vector<GpcCatalog> resolve_catalogs(const std::vector<std::string>& files) {
  std::vector<GpcCatalog> cats;
  cats.push_back(builtin_catalog(Setting(3, 6)));
  cats.push_back(builtin_catalog(Setting(4, 8)));

  auto add = [&cats](GpcCatalog cat) {
    for (auto& existing : cats) {
      if (existing.setting == cat.setting) {
        existing = std::move(cat);
        return;
      }
    }
    cats.push_back(std::move(cat));
  };

  if (const char* env = std::getenv("PINLAB_CATALOG_PATH")) {
    const std::filesystem::path dir(env);
    if (!std::filesystem::is_directory(dir))
      throw std::invalid_argument("PINLAB_CATALOG_PATH is not a directory: " +
                                  std::string(env));
    std::vector<std::filesystem::path> found;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        found.push_back(entry.path());
    std::sort(found.begin(), found.end());
    for (const auto& p : found) add(load_catalog_file(p.string()));
  }
  for (const auto& f : files) add(load_catalog_file(f));
  return cats;
}

template <class S>
HarmoniumParams<S> make_params(int n, bool have_kappa, double kappa,
                               bool have_delta, double delta) {
  if (have_kappa) return params_from_kappa<S>(n, from_double<S>(kappa));
  if (have_delta) return params_from_delta<S>(n, from_double<S>(delta));
  throw std::invalid_argument("one of --kappa or --delta is required");
}

template <class S>
struct PointAnalysis {
  HarmoniumParams<S> params;
  OccupationSpectrum<S> spectrum;
  std::vector<PinningReport<S>> reports;
  int best = -1;  // index of the report with the smallest error budget
};

template <class S>
PointAnalysis<S> analyze_point(const HarmoniumParams<S>& params,
                               const std::vector<GpcCatalog>& catalogs,
                               double tail, int max_r, int bits) {
  PointAnalysis<S> out;
  out.params = params;
  // Particle-count applicability is known before the solve; reject early so a
  // hopeless request never pays for (or fails inside) the spectrum.
  bool any = false;
  for (const auto& cat : catalogs)
    if (cat.setting.particles <= params.n) any = true;
  if (!any)
    throw std::invalid_argument(
        "no catalog is applicable to this particle number");
  SpectrumRequest req;
  req.target_tail = tail;
  req.max_R = max_r;
  req.precision_bits = bits;
  out.spectrum = solve_nons(params, req);
  const int r_dim = static_cast<int>(out.spectrum.values.size());
  for (const auto& cat : catalogs) {
    const int r = params.n - cat.setting.particles;
    if (r < 0 || r + cat.setting.dim > r_dim) continue;
    out.reports.push_back(pinning_report(cat, out.spectrum, cat.setting));
    if (out.best < 0 || out.reports.back().plan.error_bound <
                            out.reports[static_cast<std::size_t>(out.best)]
                                .plan.error_bound)
      out.best = static_cast<int>(out.reports.size()) - 1;
  }
  if (out.reports.empty())
    throw std::invalid_argument(
        "no catalog is applicable to this particle number");
  return out;
}

template <class S>
SweepRow report_row(const HarmoniumParams<S>& params,
                    const PinningReport<S>& rep) {
  SweepRow row;
  row.kappa = format_full(params.kappa);
  row.delta = format_full(params.delta);
  row.d_min = format_full(rep.d_min_value);
  row.argmin_label = rep.argmin_label;
  row.q_overall = format_full(rep.q_overall);
  row.hf_distance = format_full(rep.hf_distance_value);
  row.truncation_error = format_full(rep.plan.error_bound);
  row.setting = rep.setting.str();
  row.status = "ok";
  return row;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out.good()) throw std::runtime_error("failed writing: " + path);
}

// Runs fn<double> for precisions that fit a double, fn<Real> otherwise.
template <class F>
int with_scalar(int bits, F&& fn) {
  if (bits < 24) throw std::invalid_argument("precision below 24 bits");
  if (bits <= 64) return fn.template operator()<double>();
  set_precision_bits(bits);
  return fn.template operator()<Real>();
}

struct CommonOpts {
  int n = 0;
  double kappa = 0;
  double delta = 0;
  bool have_kappa = false;
  bool have_delta = false;
  double tail = 1e-12;
  int bits = 53;
  int max_r = 400;
  std::string format;
  std::vector<std::string> catalog_files;
};

void add_coupling_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--N", o.n, "particle number")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* grp = cmd->add_option_group("coupling", "exactly one of --kappa/--delta");
  auto* kopt = grp->add_option("--kappa", o.kappa, "coupling strength, >= 0");
  auto* dopt = grp->add_option("--delta", o.delta,
                               "log length ratio; negative probes the dual");
  grp->require_option(1);
  cmd->parse_complete_callback([kopt, dopt, &o] {
    o.have_kappa = kopt->count() > 0;
    o.have_delta = dopt->count() > 0;
  });
}

void add_precision_flags(CLI::App* cmd, CommonOpts& o, int default_bits) {
  o.bits = default_bits;
  cmd->add_option("--precision-bits", o.bits,
                  "working mantissa bits (<= 64 runs in hardware doubles)")
      ->check(CLI::Range(24, 100000));
  cmd->add_option("--tail", o.tail, "l1 bound on omitted occupation numbers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-R", o.max_r, "cap on the matrix dimension")
      ->check(CLI::PositiveNumber);
}

int run_model(const CommonOpts& o) {
  return with_scalar(o.bits, [&]<class S>() {
    const auto p = make_params<S>(o.n, o.have_kappa, o.kappa, o.have_delta,
                                  o.delta);
    if (o.format == "csv") {
      std::cout << "n_particles,kappa,delta,scale_ratio,q,basis_scale\n"
                << p.n << ',' << format_full(p.kappa) << ','
                << format_full(p.delta) << ',' << format_full(p.scale_ratio)
                << ',' << format_full(p.q) << ',' << format_full(p.basis_scale)
                << '\n';
    } else {
      std::cout << json_text(params_to_json(p));
    }
    return 0;
  });
}

int run_nons(const CommonOpts& o) {
  return with_scalar(o.bits, [&]<class S>() {
    const auto p = make_params<S>(o.n, o.have_kappa, o.kappa, o.have_delta,
                                  o.delta);
    SpectrumRequest req;
    req.target_tail = o.tail;
    req.max_R = o.max_r;
    req.precision_bits = o.bits;
    const auto spec = solve_nons(p, req);
    if (o.format == "structured") {
      nlohmann::json j;
      j["params"] = params_to_json(p);
      j["spectrum"] = spectrum_to_json(spec);
      std::cout << json_text(j);
    } else {
      std::cout << "# n_particles=" << p.n << " kappa=" << format_full(p.kappa)
                << " delta=" << format_full(p.delta)
                << " q=" << format_full(p.q) << " R=" << spec.values.size()
                << " tail_bound=" << format_full(spec.tail_bound)
                << " precision_bits=" << spec.precision_bits << '\n'
                << "index,value\n";
      for (int i = 0; i < spec.values.size(); ++i)
        std::cout << i + 1 << ',' << format_full(spec.values[i]) << '\n';
    }
    return 0;
  });
}

int run_pin(const CommonOpts& o) {
  return with_scalar(o.bits, [&]<class S>() {
    const auto catalogs = resolve_catalogs(o.catalog_files);
    const auto p = make_params<S>(o.n, o.have_kappa, o.kappa, o.have_delta,
                                  o.delta);
    const auto point = analyze_point<S>(p, catalogs, o.tail, o.max_r, o.bits);
    if (o.format == "csv") {
      std::cout << csv_header() << '\n';
      for (const auto& rep : point.reports)
        std::cout << csv_row(report_row(p, rep)) << '\n';
    } else {
      nlohmann::json j;
      j["params"] = params_to_json(p);
      j["spectrum"] = spectrum_to_json(point.spectrum);
      auto& reports = j["reports"] = nlohmann::json::array();
      for (const auto& rep : point.reports) reports.push_back(report_to_json(rep));
      j["best_setting"] =
          point.reports[static_cast<std::size_t>(point.best)].setting.str();
      std::cout << json_text(j);
    }
    return 0;
  });
}

struct SweepOpts {
  CommonOpts common;
  double kappa_min = 0;
  double kappa_max = 0;
  int points = 0;
  int jobs = 0;
  std::string out_csv;
  std::string out_svg;
};

int run_sweep(const SweepOpts& so) {
  const CommonOpts& o = so.common;
  return with_scalar(o.bits, [&]<class S>() {
    const auto catalogs = resolve_catalogs(o.catalog_files);
    if (so.points < 2) throw std::invalid_argument("sweep needs >= 2 points");
    if (!(so.kappa_min > 0) || !(so.kappa_max > so.kappa_min))
      throw std::invalid_argument("sweep needs 0 < kappa-min < kappa-max");

    std::vector<double> grid(static_cast<std::size_t>(so.points));
    const double l0 = std::log(so.kappa_min);
    const double l1 = std::log(so.kappa_max);
    for (int i = 0; i < so.points; ++i)
      grid[static_cast<std::size_t>(i)] =
          std::exp(l0 + (l1 - l0) * i / (so.points - 1));

    struct PointOutcome {
      std::vector<SweepRow> rows;
      SweepPoint plot;
    };
    std::vector<PointOutcome> outcomes(grid.size());

    auto compute = [&](int i) {
      const double kappa = grid[static_cast<std::size_t>(i)];
      auto& out = outcomes[static_cast<std::size_t>(i)];
      try {
        const auto p = params_from_kappa<S>(o.n, from_double<S>(kappa));
        const auto point = analyze_point<S>(p, catalogs, o.tail, o.max_r, o.bits);
        for (const auto& rep : point.reports)
          out.rows.push_back(report_row(p, rep));
        const auto& best = point.reports[static_cast<std::size_t>(point.best)];
        out.plot.kappa = to_double(p.kappa);
        out.plot.d_min = to_double(best.d_min_value);
        out.plot.error_bound = best.plan.error_bound;
        out.plot.q_overall = best.q_overall;
        out.plot.ok = true;
      } catch (const std::exception& e) {
        SweepRow row;
        row.kappa = format_full(kappa);
        row.delta = format_full(std::log1p(kappa) / 4);
        row.status = e.what();
        out.rows.push_back(row);
        out.plot.ok = false;
      }
    };

    // High-precision scalars keep thread-local state; keep those runs serial.
    int jobs = so.jobs > 0 ? so.jobs
                           : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (o.bits > 64) jobs = 1;
    jobs = std::min(jobs, so.points);
    if (jobs == 1) {
      for (int i = 0; i < so.points; ++i) compute(i);
    } else {
      std::atomic<int> next{0};
      auto worker = [&] {
        for (int i = next.fetch_add(1); i < so.points; i = next.fetch_add(1))
          compute(i);
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    std::string csv = csv_header() + "\n";
    for (const auto& out : outcomes)
      for (const auto& row : out.rows) csv += csv_row(row) + "\n";
    if (so.out_csv.empty())
      std::cout << csv;
    else
      write_text(so.out_csv, csv);
    if (!so.out_svg.empty()) {
      std::vector<SweepPoint> pts;
      for (const auto& out : outcomes) pts.push_back(out.plot);
      write_text(so.out_svg, sweep_svg(pts));
    }
    return 0;
  });
}

struct FitOpts {
  CommonOpts common;
  std::string quantity = "dmin";
  std::vector<double> grid;
  int max_order = 0;
  bool all_powers = false;
};

int run_fit_weak(const FitOpts& fo) {
  const CommonOpts& o = fo.common;
  return with_scalar(o.bits, [&]<class S>() {
    const auto catalogs = resolve_catalogs(o.catalog_files);
    std::vector<double> grid = fo.grid;
    if (grid.empty())
      for (int i = 0; i < 9; ++i) grid.push_back(0.05 + 0.0125 * i);
    // Default order: two orders past the deepest expected lead, capped so the
    // default grid still satisfies the sample-count precondition. The grid
    // tops out at 0.15: on coarser grids the unmodeled remainder projects
    // onto low orders strongly enough to defeat the zero rule.
    const int max_order =
        fo.max_order > 0 ? fo.max_order : std::min(2 * o.n + 6, 14);

    // Quantity selectors: dmin (native-setting polytope distance), bd (the
    // three-particle six-level distance after truncation), lambda:<i>, and
    // dev:<i> (deviation from the Hartree-Fock value of entry i).
    int index = 0;
    enum class Kind { DMin, Bd, Lambda, Dev } kind;
    if (fo.quantity == "dmin") {
      kind = Kind::DMin;
    } else if (fo.quantity == "bd") {
      kind = Kind::Bd;
    } else if (fo.quantity.rfind("lambda:", 0) == 0) {
      kind = Kind::Lambda;
      index = std::stoi(fo.quantity.substr(7));
    } else if (fo.quantity.rfind("dev:", 0) == 0) {
      kind = Kind::Dev;
      index = std::stoi(fo.quantity.substr(4));
    } else {
      throw std::invalid_argument("unknown quantity: " + fo.quantity);
    }
    const GpcCatalog* cat = nullptr;
    const int want_particles = kind == Kind::Bd ? 3 : o.n;
    if (kind == Kind::DMin || kind == Kind::Bd) {
      for (const auto& c : catalogs)
        if (c.setting.particles == want_particles &&
            (cat == nullptr || c.setting.dim < cat->setting.dim))
          cat = &c;
      if (cat == nullptr)
        throw std::invalid_argument("no catalog for the requested quantity");
    }

    std::vector<std::pair<S, S>> samples;
    for (double d : grid) {
      const auto p = params_from_delta<S>(o.n, from_double<S>(d));
      SpectrumRequest req;
      req.target_tail = o.tail;
      req.max_R = o.max_r;
      req.precision_bits = o.bits;
      const auto spec = solve_nons(p, req);
      S value = S(0);
      switch (kind) {
        case Kind::DMin:
        case Kind::Bd: {
          const auto rep = pinning_report(*cat, spec, cat->setting);
          value = rep.d_min_value;
          break;
        }
        case Kind::Lambda:
          if (index < 1 || index > spec.values.size())
            throw std::invalid_argument("lambda index out of range");
          value = spec.values[index - 1];
          break;
        case Kind::Dev:
          if (index < 1 || index > spec.values.size())
            throw std::invalid_argument("dev index out of range");
          value = index <= o.n ? S(1) - spec.values[index - 1]
                               : spec.values[index - 1];
          break;
      }
      samples.emplace_back(from_double<S>(d), value);
    }

    const FitResult fit = fit_leading(samples, max_order, !fo.all_powers);
    if (o.format == "csv") {
      std::cout << "order,coefficient\n";
      for (std::size_t i = 0; i < fit.orders.size(); ++i)
        std::cout << fit.orders[i] << ',' << format_full(fit.coefficients[i])
                  << '\n';
      std::cout << "# exponent=" << fit.exponent
                << " coefficient=" << format_full(fit.coefficient)
                << " residual=" << format_full(fit.residual) << '\n';
    } else {
      nlohmann::json j;
      j["quantity"] = fo.quantity;
      j["n_particles"] = o.n;
      j["precision_bits"] = o.bits;
      j["exponent"] = fit.exponent;
      j["coefficient"] = format_full(fit.coefficient);
      j["residual"] = format_full(fit.residual);
      auto& grid_j = j["grid"] = nlohmann::json::array();
      for (double d : grid) grid_j.push_back(format_full(d));
      auto& co = j["coefficients"] = nlohmann::json::array();
      for (std::size_t i = 0; i < fit.orders.size(); ++i) {
        nlohmann::json e;
        e["order"] = fit.orders[i];
        e["value"] = format_full(fit.coefficients[i]);
        co.push_back(e);
      }
      std::cout << json_text(j);
    }
    return 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occupation spectra and polytope quasipinning for harmonically "
               "interacting fermions"};
  app.require_subcommand(1);
  std::function<int()> action;

  CommonOpts model_o;
  auto* model = app.add_subcommand("model", "print model parameters");
  add_coupling_flags(model, model_o);
  model->add_option("--precision-bits", model_o.bits)->check(CLI::Range(24, 100000));
  model->add_option("--format", model_o.format)
      ->check(CLI::IsMember({"csv", "structured"}));
  model->callback([&] { action = [&] { return run_model(model_o); }; });

  auto* cat = app.add_subcommand("catalog", "constraint catalog management");
  cat->require_subcommand(1);
  std::vector<std::string> validate_files;
  auto* validate = cat->add_subcommand("validate", "check catalog files");
  validate->add_option("files", validate_files, "catalog JSON files")
      ->required()
      ->expected(-1);
  validate->callback([&] {
    action = [&] {
      bool failed = false;
      for (const auto& f : validate_files) {
        try {
          const auto c = load_catalog_file(f);
          int proper = 0, structural = 0;
          for (const auto& gc : c.constraints)
            (gc.structural ? structural : proper)++;
          std::cout << f << ": ok: setting " << c.setting.str() << ", "
                    << proper << " proper, " << structural
                    << " structural constraints\n";
        } catch (const std::exception& e) {
          std::cerr << f << ": " << e.what() << '\n';
          failed = true;
        }
      }
      if (failed) throw std::invalid_argument("catalog validation failed");
      return 0;
    };
  });
  std::vector<int> show_setting;
  std::vector<std::string> show_files;
  auto* show = cat->add_subcommand("show", "print the catalog for a setting");
  show->add_option("setting", show_setting, "particle number and dimension")
      ->required()
      ->expected(2);
  show->add_option("--catalog", show_files, "extra catalog file")->type_size(1);
  show->callback([&] {
    action = [&] {
      const auto cats = resolve_catalogs(show_files);
      const Setting want(show_setting[0], show_setting[1]);
      for (const auto& c : cats)
        if (c.setting == want) {
          std::cout << serialize_catalog(c);
          return 0;
        }
      throw std::invalid_argument("no catalog for setting " + want.str());
    };
  });

  CommonOpts nons_o;
  auto* nons = app.add_subcommand("nons", "natural occupation numbers");
  add_coupling_flags(nons, nons_o);
  add_precision_flags(nons, nons_o, 53);
  nons->add_option("--format", nons_o.format)
      ->check(CLI::IsMember({"csv", "structured"}));
  nons->callback([&] { action = [&] { return run_nons(nons_o); }; });

  CommonOpts pin_o;
  auto* pin = app.add_subcommand("pin", "quasipinning report");
  add_coupling_flags(pin, pin_o);
  add_precision_flags(pin, pin_o, 53);
  pin->add_option("--catalog", pin_o.catalog_files, "catalog file, repeatable")
      ->type_size(1);
  pin->add_option("--format", pin_o.format)
      ->check(CLI::IsMember({"csv", "structured"}));
  pin->callback([&] { action = [&] { return run_pin(pin_o); }; });

  SweepOpts sweep_o;
  auto* sweep = app.add_subcommand("sweep", "coupling sweep with error bars");
  sweep->add_option("--N", sweep_o.common.n, "particle number")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--kappa-min", sweep_o.kappa_min)->required();
  sweep->add_option("--kappa-max", sweep_o.kappa_max)->required();
  sweep->add_option("--points", sweep_o.points)
      ->required()
      ->check(CLI::Range(2, 1000000));
  add_precision_flags(sweep, sweep_o.common, 53);
  sweep->add_option("--catalog", sweep_o.common.catalog_files)->type_size(1);
  sweep->add_option("--jobs", sweep_o.jobs, "worker threads, 0 = auto");
  sweep->add_option("--out-csv", sweep_o.out_csv);
  sweep->add_option("--out-svg", sweep_o.out_svg);
  sweep->callback([&] { action = [&] { return run_sweep(sweep_o); }; });

  FitOpts fit_o;
  auto* fit = app.add_subcommand("fit-weak", "weak-coupling series fit");
  fit->add_option("--N", fit_o.common.n, "particle number")
      ->required()
      ->check(CLI::PositiveNumber);
  add_precision_flags(fit, fit_o.common, 256);
  fit_o.common.tail = 1e-40;
  fit->add_option("--quantity", fit_o.quantity,
                  "dmin | bd | lambda:<i> | dev:<i>");
  fit->add_option("--grid", fit_o.grid, "delta sample points");
  fit->add_option("--max-order", fit_o.max_order);
  fit->add_flag("--all-powers", fit_o.all_powers,
                "fit odd powers too instead of the even basis");
  fit->add_option("--catalog", fit_o.common.catalog_files)->type_size(1);
  fit->add_option("--format", fit_o.common.format)
      ->check(CLI::IsMember({"csv", "structured"}));
  fit->callback([&] { action = [&] { return run_fit_weak(fit_o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return action ? action() : 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
