// Command-line front end. Five subcommands (spectrum, groundstate, qfi,
// protocol, anticrossing) over the three trap models, emitting CSV or JSON
// with the full resolved configuration embedded. Outputs are assembled in
// grid order, so runs are byte-identical regardless of ROTOMETRY_THREADS.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <rotometry/rotometry.hpp>

namespace {

using nlohmann::ordered_json;
using namespace rotometry;

// ---------------------------------------------------------------------------
// Option bag. Everything is optional at parse time; a JSON config file fills
// values the command line left untouched, then per-command validation runs on
// the merged result.
// ---------------------------------------------------------------------------

struct Options {
  std::string config_path;
  std::string model = "three-site";
  int num_particles = -1;  // -1: use the model's default
  double tunneling = 1.0;
  double onsite = 1.0;
  std::string phi = "0";
  double interaction = 0.0;
  double asymmetry = 0.0;
  std::string omega = "0";
  int mode_cutoff = 6;
  long angular_momentum_cap = -1;  // -1: uncapped
  double barrier = 0.0;
  int k_min = -1;
  int k_max = 2;
  std::string basis = "flow";
  std::string output = "-";
  std::string format;  // empty: per-command default

  int levels = 4;
  double min_weight = 1e-12;
  std::vector<std::string> states;
  int atoms = 10;
  std::string loss = "0:0.5:51";
  std::string generator;  // empty: per-state default
  double prep_omega = 0.5 * std::numbers::pi;
  double ramp_duration = 100.0;
  double hold_detuning = 0.1;
  double hold_barrier = 0.0;
  std::string times = "0:1500:151";
  double adiabatic_floor = 5.0;
  double bracket_tol = 1e-9;
};

GridSpec grid_or_value(const std::string& text, const std::string& what) {
  if (text.find(':') != std::string::npos) return GridSpec::parse(text);
  const double v = rotometry::detail::parse_double(text, what);
  return GridSpec{v, v, 1};
}

double scalar_only(const std::string& text, const std::string& what) {
  const GridSpec g = grid_or_value(text, what);
  if (g.count != 1) throw ConfigError(what + ": expected a single value, got a grid");
  return g.start;
}

// ---------------------------------------------------------------------------
// Model plumbing: a builder over the sweep parameter plus unit bookkeeping.
// Three-site energies are reported in units of J (falling back to U when
// J=0); the pancake and ring builders already work in their natural units.
// ---------------------------------------------------------------------------

struct Model {
  std::string name;
  std::string sweep_name;  // phi or omega
  GridSpec sweep;
  std::string unit = "dimensionless";
  double unit_scale = 1.0;  // reported energy = raw / unit_scale
  std::function<ManyBodyOperator(double)> build;
  ordered_json config;  // resolved parameters for the output header
};

Model make_model(const Options& o) {
  Model m;
  m.name = o.model;
  if (o.model == "three-site") {
    ThreeSiteParams p;
    p.num_particles = o.num_particles < 0 ? 1 : o.num_particles;
    p.tunneling = o.tunneling;
    p.interaction = o.onsite;
    if (o.basis != "site" && o.basis != "flow") {
      throw ConfigError("basis: expected 'site' or 'flow', got '" + o.basis + "'");
    }
    const bool flow = o.basis == "flow";
    m.sweep_name = "phi";
    m.sweep = grid_or_value(o.phi, "phi");
    if (p.tunneling != 0.0) {
      m.unit = "J";
      m.unit_scale = p.tunneling;
    } else if (p.interaction != 0.0) {
      m.unit = "U";
      m.unit_scale = p.interaction;
    }
    m.build = [p, flow](double phase) {
      ThreeSiteParams q = p;
      q.phase = phase;
      return flow ? three_site_flow_basis(q) : three_site_site_basis(q);
    };
    m.config["model"] = "three-site";
    m.config["N"] = p.num_particles;
    m.config["J"] = p.tunneling;
    m.config["U"] = p.interaction;
    m.config["basis"] = o.basis;
    m.config["phi"] = o.phi;
  } else if (o.model == "pancake") {
    PancakeParams p;
    p.num_particles = o.num_particles < 0 ? 2 : o.num_particles;
    p.interaction = o.interaction;
    p.asymmetry = o.asymmetry;
    p.mode_cutoff = o.mode_cutoff;
    if (o.angular_momentum_cap >= 0) p.max_total_angular_momentum = o.angular_momentum_cap;
    m.sweep_name = "omega";
    m.sweep = grid_or_value(o.omega, "omega");
    m.unit = "hbar_omega_xy";
    m.build = [p](double rotation) {
      PancakeParams q = p;
      q.rotation = rotation;
      return pancake_hamiltonian(q);
    };
    m.config["model"] = "pancake";
    m.config["N"] = p.num_particles;
    m.config["g"] = p.interaction;
    m.config["A"] = p.asymmetry;
    m.config["mmax"] = p.mode_cutoff;
    if (p.max_total_angular_momentum) m.config["Lmax"] = *p.max_total_angular_momentum;
    m.config["omega"] = o.omega;
  } else if (o.model == "ring") {
    RingParams p;
    p.num_particles = o.num_particles < 0 ? 1 : o.num_particles;
    p.barrier = o.barrier;
    p.interaction = o.interaction;
    p.k_min = o.k_min;
    p.k_max = o.k_max;
    m.sweep_name = "omega";
    m.sweep = grid_or_value(o.omega, "omega");
    m.unit = "E0";
    m.build = [p](double rotation) {
      RingParams q = p;
      q.rotation = rotation;
      return ring_hamiltonian(q);
    };
    m.config["model"] = "ring";
    m.config["N"] = p.num_particles;
    m.config["b"] = p.barrier;
    m.config["g"] = p.interaction;
    m.config["kmin"] = p.k_min;
    m.config["kmax"] = p.k_max;
    m.config["omega"] = o.omega;
  } else {
    throw ConfigError("model: expected three-site, pancake, or ring; got '" + o.model + "'");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Output document: metadata plus tables, written as commented CSV or JSON.
// Cells hold typed JSON values; the CSV writer formats doubles to 12
// significant digits and the JSON writer emits them as-is.
// ---------------------------------------------------------------------------

struct Table {
  std::string name;  // emitted as a "# name" block label
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;
};

struct Document {
  ordered_json config;
  std::string unit = "dimensionless";
  ordered_json report;  // flat key->value block, optional
  std::vector<Table> tables;
  ordered_json extra;  // JSON-only payload (groundstate structure)
};

std::string csv_field(const ordered_json& cell) {
  std::string s;
  if (cell.is_string()) {
    s = cell.get<std::string>();
  } else if (cell.is_number_integer()) {
    s = cell.dump();
  } else if (cell.is_number()) {
    s = format_significant(cell.get<double>());
  } else {
    s = cell.dump();
  }
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    return quoted;
  }
  return s;
}

void write_csv(std::ostream& os, const Document& doc) {
  os << "# rotometry " << kVersion << "\n";
  os << "# unit=" << doc.unit << "\n";
  os << "# config=" << doc.config.dump() << "\n";
  if (doc.report.is_object()) {
    for (const auto& [key, value] : doc.report.items()) {
      os << "# " << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump())
         << "\n";
    }
  }
  for (const Table& t : doc.tables) {
    if (!t.name.empty()) os << "# " << t.name << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      os << (c ? "," : "") << t.columns[c];
    }
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        os << (c ? "," : "") << csv_field(row[c]);
      }
      os << "\n";
    }
  }
}

void write_json(std::ostream& os, const Document& doc) {
  ordered_json out;
  out["tool"]["name"] = "rotometry";
  out["tool"]["version"] = kVersion;
  out["unit"] = doc.unit;
  out["config"] = doc.config;
  if (doc.report.is_object()) out["report"] = doc.report;
  if (doc.extra.is_object()) {
    for (const auto& [key, value] : doc.extra.items()) out[key] = value;
  }
  if (!doc.tables.empty()) {
    out["tables"] = ordered_json::array();
    for (const Table& t : doc.tables) {
      ordered_json jt;
      jt["name"] = t.name;
      jt["columns"] = t.columns;
      jt["rows"] = t.rows;
      out["tables"].push_back(std::move(jt));
    }
  }
  os << out.dump(2) << "\n";
}

void write_document(const Options& o, const std::string& default_format, const Document& doc) {
  const std::string fmt = o.format.empty() ? default_format : o.format;
  if (fmt != "csv" && fmt != "json") {
    throw ConfigError("format: expected 'csv' or 'json', got '" + fmt + "'");
  }
  std::ostringstream body;
  if (fmt == "csv") {
    write_csv(body, doc);
  } else {
    write_json(body, doc);
  }
  if (o.output == "-") {
    std::cout << body.str();
    return;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw ConfigError("output: cannot open '" + o.output + "' for writing");
  file << body.str();
  if (!file) throw ConfigError("output: write to '" + o.output + "' failed");
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

void cmd_spectrum(const Options& o) {
  Model m = make_model(o);
  const std::vector<double> grid = m.sweep.values();

  int levels = o.levels;
  if (levels < 1) throw ConfigError("k: need at least one level");
  const auto dim = m.build(grid.front()).dim();
  if (levels > dim) levels = static_cast<int>(dim);

  const auto sweep = sweep_spectrum(grid, levels, m.build);

  Document doc;
  doc.config = m.config;
  doc.config["subcommand"] = "spectrum";
  doc.config["k"] = levels;
  doc.unit = m.unit;
  Table t;
  t.columns.push_back(m.sweep_name);
  for (int i = 0; i < levels; ++i) t.columns.push_back("E" + std::to_string(i));
  for (const SweepPoint& pt : sweep) {
    std::vector<ordered_json> row;
    row.emplace_back(pt.parameter);
    for (int i = 0; i < levels; ++i) row.emplace_back(pt.energies(i) / m.unit_scale);
    t.rows.push_back(std::move(row));
  }
  doc.tables.push_back(std::move(t));
  write_document(o, "csv", doc);
}

void cmd_groundstate(const Options& o) {
  Model m = make_model(o);
  if (m.sweep.count != 1) {
    throw ConfigError("groundstate: " + m.sweep_name + " must be a single value, not a grid");
  }
  const double x = m.sweep.start;
  const GroundState gs = ground_state(m.build(x));
  const PureState& psi = gs.state;
  const FockBasis& basis = *psi.basis();

  Document doc;
  doc.config = m.config;
  doc.config["subcommand"] = "groundstate";
  doc.config["min-weight"] = o.min_weight;
  doc.unit = m.unit;

  doc.report["energy"] = gs.energy / m.unit_scale;
  doc.report["gap"] = gs.gap / m.unit_scale;
  doc.report["degenerate"] = gs.degenerate ? 1 : 0;

  ordered_json modes = ordered_json::array();
  for (int p = 0; p < basis.modes().size(); ++p) modes.push_back(basis.modes().label(p));
  doc.extra["modes"] = modes;

  Table amps;
  amps.name = "amplitudes";
  for (int p = 0; p < basis.modes().size(); ++p) {
    amps.columns.push_back("n_" + std::to_string(basis.modes().label(p)));
  }
  amps.columns.insert(amps.columns.end(), {"re", "im", "p"});
  ordered_json jamps = ordered_json::array();
  for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
    const Complex a = psi.amplitudes()(i);
    const double w = std::norm(a);
    if (w < o.min_weight) continue;
    const Occupation& occ = basis.state(i);
    std::vector<ordered_json> row(occ.begin(), occ.end());
    row.emplace_back(a.real());
    row.emplace_back(a.imag());
    row.emplace_back(w);
    ordered_json ja;
    ja["n"] = occ;
    ja["re"] = a.real();
    ja["im"] = a.imag();
    ja["p"] = w;
    jamps.push_back(std::move(ja));
    amps.rows.push_back(std::move(row));
  }
  doc.extra["amplitudes"] = std::move(jamps);

  // Weight per total angular momentum sector, summed over the whole state.
  std::map<long, double> sectors;
  for (FockBasis::Index i = 0; i < basis.dim(); ++i) {
    sectors[basis.label_weight(i)] += std::norm(psi.amplitudes()(i));
  }
  Table sect;
  sect.name = "sector_weights";
  sect.columns = {"L", "weight"};
  ordered_json jsect = ordered_json::array();
  for (const auto& [lw, w] : sectors) {
    sect.rows.push_back({ordered_json(lw), ordered_json(w)});
    ordered_json js;
    js["L"] = lw;
    js["weight"] = w;
    jsect.push_back(std::move(js));
  }
  doc.extra["sector_weights"] = std::move(jsect);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> obdm(one_body_density_matrix(psi));
  const Eigen::VectorXd occs = obdm.eigenvalues().reverse();
  Table nat;
  nat.name = "natural_occupations";
  nat.columns = {"orbital", "occupation"};
  ordered_json jnat = ordered_json::array();
  for (Eigen::Index i = 0; i < occs.size(); ++i) {
    nat.rows.push_back({ordered_json(static_cast<long>(i)), ordered_json(occs(i))});
    jnat.push_back(occs(i));
  }
  doc.extra["natural_occupations"] = std::move(jnat);

  doc.tables.push_back(std::move(amps));
  doc.tables.push_back(std::move(sect));
  doc.tables.push_back(std::move(nat));

  if (m.name == "pancake") {
    // The capped ground state is embedded into the uncapped basis before the
    // orbital rotation; the rotation does not preserve total L, so the capped
    // basis could not hold the rotated state.
    PureState analyzed = psi;
    if (basis.truncated()) {
      BasisOptions bo;
      bo.max_total_label_weight.reset();
      analyzed = embed(psi, FockBasis::build(basis.num_particles(), basis.modes(), bo));
    }
    const OrbitalPairDistribution orb = dominant_orbital_pair(analyzed);
    ordered_json jorb;
    jorb["extreme_first"] = orb.extreme_first;
    jorb["extreme_second"] = orb.extreme_second;
    jorb["half_difference_variance"] = orb.half_difference_variance;
    Table joint;
    joint.name = "orbital_pair_joint";
    joint.columns = {"n_first", "n_second", "p"};
    ordered_json jj = ordered_json::array();
    for (const auto& [key, p] : orb.joint) {
      joint.rows.push_back({ordered_json(key.first), ordered_json(key.second), ordered_json(p)});
      ordered_json je;
      je["n_first"] = key.first;
      je["n_second"] = key.second;
      je["p"] = p;
      jj.push_back(std::move(je));
    }
    jorb["joint"] = std::move(jj);
    doc.extra["orbital_pair"] = std::move(jorb);
    doc.tables.push_back(std::move(joint));
  }

  write_document(o, "json", doc);
}

void cmd_qfi(const Options& o) {
  if (o.states.empty()) {
    throw ConfigError("qfi: need at least one --state (noon, bat, unentangled, ground)");
  }
  const GridSpec loss_grid = grid_or_value(o.loss, "loss");
  const std::vector<double> losses = loss_grid.values();

  Document doc;
  doc.config["subcommand"] = "qfi";
  doc.config["states"] = o.states;
  doc.config["atoms"] = o.atoms;
  doc.config["loss"] = o.loss;
  doc.unit = "dimensionless";

  bool model_used = false;
  for (const std::string& tag : o.states) {
    PureState psi = [&] {
      if (tag == "ground") {
        Model m = make_model(o);
        if (m.sweep.count != 1) {
          throw ConfigError("qfi: " + m.sweep_name + " must be a single value for --state ground");
        }
        if (!model_used) {
          for (const auto& [key, value] : m.config.items()) doc.config[key] = value;
          doc.unit = m.unit;
          model_used = true;
        }
        return ground_state(m.build(m.sweep.start)).state;
      }
      auto basis = two_mode_basis(o.atoms);
      if (tag == "noon") return noon_state(basis, 0, 1);
      if (tag == "bat") return bat_state(basis, 0, 1);
      if (tag == "unentangled") return unentangled_probe(basis, 0, 1);
      throw ConfigError("state: expected noon, bat, unentangled, or ground; got '" + tag + "'");
    }();

    std::string gen_name = o.generator;
    if (gen_name.empty()) gen_name = tag == "ground" ? "circulation" : "half-difference";
    const PhaseGenerator gen = [&] {
      if (gen_name == "circulation") return PhaseGenerator::circulation(*psi.basis());
      if (gen_name == "half-difference") return PhaseGenerator::half_difference(*psi.basis(), 0, 1);
      throw ConfigError("generator: expected half-difference or circulation, got '" + gen_name +
                        "'");
    }();

    const auto curve = qfi_vs_loss(psi, gen, losses);
    Table t;
    t.name = "state=" + tag + " generator=" + gen_name;
    t.columns = {"loss", "FQ", "deltaphi_min"};
    for (const auto& [l, fq] : curve) {
      const double dphi = fq > 0.0 ? 1.0 / std::sqrt(fq) : std::numeric_limits<double>::infinity();
      t.rows.push_back({ordered_json(l), ordered_json(fq), ordered_json(dphi)});
    }
    doc.tables.push_back(std::move(t));
  }
  write_document(o, "csv", doc);
}

void cmd_protocol(const Options& o) {
  Options ring_opts = o;
  ring_opts.model = "ring";
  Model m = make_model(ring_opts);
  if (m.sweep.count != 1) {
    throw ConfigError("protocol: omega must be a single value, not a grid");
  }

  GyroscopeProtocolConfig cfg;
  cfg.ring.num_particles = o.num_particles < 0 ? 1 : o.num_particles;
  cfg.ring.barrier = o.barrier;
  cfg.ring.interaction = o.interaction;
  cfg.ring.rotation = m.sweep.start;
  cfg.ring.k_min = o.k_min;
  cfg.ring.k_max = o.k_max;
  cfg.prep_rotation = o.prep_omega;
  cfg.ramp_duration = o.ramp_duration;
  cfg.hold_detuning = o.hold_detuning;
  cfg.hold_barrier = o.hold_barrier;
  cfg.hold_times = grid_or_value(o.times, "times").values();

  const ProtocolResult res = gyroscope_protocol(cfg);

  // Landau-Zener style adiabaticity figure for the ramp: the gap slope is
  // estimated from the endpoints, the sweep rate from the ramp duration.
  const auto gap_of = [&](double omega) {
    RingParams p = cfg.ring;
    p.rotation = omega;
    const EigenResult r = eigensolve(ring_hamiltonian(p), 2);
    return r.values(1) - r.values(0);
  };
  const double gap_prep = gap_of(cfg.prep_rotation);
  const double span = std::abs(cfg.ring.rotation - cfg.prep_rotation);
  double lz = std::numeric_limits<double>::infinity();
  if (span > 0.0 && cfg.ramp_duration > 0.0) {
    const double slope = std::abs(gap_prep - res.crossing_gap) / span;
    const double rate = span / cfg.ramp_duration;
    if (slope * rate > 0.0) {
      lz = 2.0 * std::numbers::pi * 0.25 * res.crossing_gap * res.crossing_gap / (slope * rate);
    }
  }

  Document doc;
  doc.config = m.config;
  doc.config["subcommand"] = "protocol";
  doc.config["prep-omega"] = cfg.prep_rotation;
  doc.config["ramp-duration"] = cfg.ramp_duration;
  doc.config["hold-detuning"] = cfg.hold_detuning;
  doc.config["hold-barrier"] = cfg.hold_barrier;
  doc.config["times"] = o.times;
  doc.config["adiabatic-floor"] = o.adiabatic_floor;
  doc.unit = m.unit;

  doc.report["crossing_gap"] = res.crossing_gap;
  doc.report["extreme_low_weight"] = res.extreme_low_weight;
  doc.report["extreme_high_weight"] = res.extreme_high_weight;
  doc.report["adiabaticity"] = lz;
  doc.report["adiabaticity_warning"] = lz < o.adiabatic_floor ? 1 : 0;

  Table t;
  t.name = "return_probability";
  t.columns = {"time", "P"};
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    t.rows.push_back({ordered_json(res.times[i]), ordered_json(res.return_probability[i])});
  }
  doc.tables.push_back(std::move(t));
  write_document(o, "csv", doc);
}

void cmd_anticrossing(const Options& o) {
  Model m = make_model(o);
  if (m.sweep.count < 3) {
    throw ConfigError("anticrossing: " + m.sweep_name +
                      " must be a grid with at least 3 points (search bracket)");
  }
  AntiCrossingOptions aopts;
  aopts.coarse_points = m.sweep.count;
  aopts.parameter_tol = o.bracket_tol;
  const AntiCrossing found = find_anticrossing(m.sweep.start, m.sweep.stop, m.build, aopts);

  Document doc;
  doc.config = m.config;
  doc.config["subcommand"] = "anticrossing";
  doc.config["tol"] = o.bracket_tol;
  doc.unit = m.unit;
  doc.report[m.sweep_name] = found.parameter;
  doc.report["gap"] = found.gap / m.unit_scale;
  doc.report["evaluations"] = found.evaluations;
  write_document(o, "json", doc);
}

// ---------------------------------------------------------------------------
// Config file merge: JSON keys named like the long options fill in whatever
// the command line did not set. Flags always win.
// ---------------------------------------------------------------------------

void merge_config_file(const CLI::App& app, const CLI::App* sub, Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw ConfigError("config: cannot open '" + o.config_path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config: " + o.config_path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

  const auto was_set = [&](const std::string& name) {
    const std::string flag = "--" + name;
    const CLI::Option* opt = app.get_option_no_throw(flag);
    if (opt && opt->count() > 0) return true;
    if (sub) {
      opt = sub->get_option_no_throw(flag);
      if (opt && opt->count() > 0) return true;
    }
    return false;
  };

  const auto grid_text = [](const ordered_json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw ConfigError("config: " + key + " must be a string or number");
  };

  for (const auto& [key, value] : j.items()) {
    if (was_set(key)) continue;
    try {
      if (key == "model") o.model = value.get<std::string>();
      else if (key == "N") o.num_particles = value.get<int>();
      else if (key == "J") o.tunneling = value.get<double>();
      else if (key == "U") o.onsite = value.get<double>();
      else if (key == "phi") o.phi = grid_text(value, key);
      else if (key == "g") o.interaction = value.get<double>();
      else if (key == "A") o.asymmetry = value.get<double>();
      else if (key == "omega") o.omega = grid_text(value, key);
      else if (key == "mmax") o.mode_cutoff = value.get<int>();
      else if (key == "Lmax") o.angular_momentum_cap = value.get<long>();
      else if (key == "b") o.barrier = value.get<double>();
      else if (key == "kmin") o.k_min = value.get<int>();
      else if (key == "kmax") o.k_max = value.get<int>();
      else if (key == "basis") o.basis = value.get<std::string>();
      else if (key == "output") o.output = value.get<std::string>();
      else if (key == "format") o.format = value.get<std::string>();
      else if (key == "k") o.levels = value.get<int>();
      else if (key == "min-weight") o.min_weight = value.get<double>();
      else if (key == "state") {
        if (value.is_array()) o.states = value.get<std::vector<std::string>>();
        else o.states = {value.get<std::string>()};
      }
      else if (key == "atoms") o.atoms = value.get<int>();
      else if (key == "loss") o.loss = grid_text(value, key);
      else if (key == "generator") o.generator = value.get<std::string>();
      else if (key == "prep-omega") o.prep_omega = value.get<double>();
      else if (key == "ramp-duration") o.ramp_duration = value.get<double>();
      else if (key == "hold-detuning") o.hold_detuning = value.get<double>();
      else if (key == "hold-barrier") o.hold_barrier = value.get<double>();
      else if (key == "times") o.times = grid_text(value, key);
      else if (key == "adiabatic-floor") o.adiabatic_floor = value.get<double>();
      else if (key == "tol") o.bracket_tol = value.get<double>();
      else throw ConfigError("config: unknown key '" + key + "'");
    } catch (const ordered_json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"Rotating-trap spectra, ground states, and phase-estimation figures"};
  app.require_subcommand(1);

  app.add_option("--config", o.config_path, "JSON config file; command-line flags override it");
  app.add_option("--model", o.model, "three-site, pancake, or ring");
  app.add_option("--N", o.num_particles, "particle number of the model");
  app.add_option("--J", o.tunneling, "three-site: tunneling amplitude");
  app.add_option("--U", o.onsite, "three-site: on-site interaction");
  app.add_option("--phi", o.phi, "three-site: loop phase, value or start:stop:count");
  app.add_option("--g", o.interaction, "pancake/ring: interaction strength");
  app.add_option("--A", o.asymmetry, "pancake: trap asymmetry");
  app.add_option("--omega", o.omega, "pancake/ring: rotation rate, value or start:stop:count");
  app.add_option("--mmax", o.mode_cutoff, "pancake: highest Landau orbital");
  app.add_option("--Lmax", o.angular_momentum_cap,
                 "pancake: cap on total angular momentum (-1 = none)");
  app.add_option("--b", o.barrier, "ring: barrier strength");
  app.add_option("--kmin", o.k_min, "ring: lowest momentum mode");
  app.add_option("--kmax", o.k_max, "ring: highest momentum mode");
  app.add_option("--basis", o.basis, "three-site: site or flow basis");
  app.add_option("--output", o.output, "output path, - for stdout");
  app.add_option("--format", o.format, "csv or json");

  CLI::App* spectrum = app.add_subcommand("spectrum", "lowest levels across a parameter grid");
  spectrum->add_option("--k", o.levels, "number of levels");

  CLI::App* groundstate = app.add_subcommand("groundstate", "ground-state report at one point");
  groundstate->add_option("--min-weight", o.min_weight, "drop amplitudes below this probability");

  CLI::App* qfi = app.add_subcommand("qfi", "quantum Fisher information against particle loss");
  qfi->add_option("--state", o.states, "noon, bat, unentangled, or ground (repeatable)");
  qfi->add_option("--atoms", o.atoms, "particle number of the two-mode probe states");
  qfi->add_option("--loss", o.loss, "loss fraction, value or start:stop:count");
  qfi->add_option("--generator", o.generator, "half-difference or circulation");

  CLI::App* protocol = app.add_subcommand("protocol", "stirred-ring interference protocol");
  protocol->add_option("--prep-omega", o.prep_omega, "rotation rate the ramp starts from");
  protocol->add_option("--ramp-duration", o.ramp_duration, "ramp time to the crossing");
  protocol->add_option("--hold-detuning", o.hold_detuning, "rotation offset during the hold");
  protocol->add_option("--hold-barrier", o.hold_barrier, "barrier strength during the hold");
  protocol->add_option("--times", o.times, "hold times, value or start:stop:count");
  protocol->add_option("--adiabatic-floor", o.adiabatic_floor,
                       "warn when the ramp's adiabaticity figure drops below this");

  CLI::App* anticrossing =
      app.add_subcommand("anticrossing", "locate the gap minimum inside a parameter bracket");
  anticrossing->add_option("--tol", o.bracket_tol, "parameter tolerance of the refined minimum");

  for (CLI::App* sub : {spectrum, groundstate, qfi, protocol, anticrossing}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("arguments: ") + e.what());
  }

  const CLI::App* sub = app.get_subcommands().front();
  merge_config_file(app, sub, o);

  const std::string& name = sub->get_name();
  if (name == "spectrum") cmd_spectrum(o);
  else if (name == "groundstate") cmd_groundstate(o);
  else if (name == "qfi") cmd_qfi(o);
  else if (name == "protocol") cmd_protocol(o);
  else if (name == "anticrossing") cmd_anticrossing(o);
  return 0;
}

void emit_error_json(const char* type, const std::string& message) {
  ordered_json e;
  e["error"]["type"] = type;
  e["error"]["message"] = message;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    emit_error_json("config", e.what());
    return 2;
  } catch (const NumericalError& e) {
    emit_error_json("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error_json("internal", e.what());
    return 3;
  }
}
