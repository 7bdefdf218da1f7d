#include "afdmsense/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace afdmsense {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) out.push_back(trim(cur));
  if (out.empty()) out.push_back("");
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& tok, int line, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': cannot parse number '" + tok + "'");
  }
  if (pos != tok.size())
    fail(line, "key '" + key + "': trailing characters in '" + tok + "'");
  return v;
}

long long to_ll(const std::string& tok, int line, const std::string& key) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': cannot parse integer '" + tok + "'");
  }
  if (pos != tok.size())
    fail(line, "key '" + key + "': trailing characters in '" + tok + "'");
  return v;
}

std::uint64_t to_u64(const std::string& tok, int line, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': cannot parse unsigned '" + tok + "'");
  }
  if (pos != tok.size())
    fail(line, "key '" + key + "': trailing characters in '" + tok + "'");
  return v;
}

bool to_bool(const std::string& tok, int line, const std::string& key) {
  if (tok == "true" || tok == "1") return true;
  if (tok == "false" || tok == "0") return false;
  fail(line, "key '" + key + "': expected true/false, got '" + tok + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += f(v[i]);
  }
  return out;
}

}  // namespace

SweepConfig parse_config(std::istream& in) {
  SweepConfig cfg;
  std::vector<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string entry = trim(raw);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, "key '" + key + "': empty value");
    for (const auto& s : seen)
      if (s == key) fail(line, "duplicate key '" + key + "'");
    seen.push_back(key);

    const std::vector<std::string> list = split_list(value);
    const bool multi = list.size() > 1;
    auto scalar_only = [&] {
      if (multi) fail(line, "key '" + key + "' does not accept a list");
      return list[0];
    };

    if (key == "n_sub") {
      cfg.base.afdm.n_sub = static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "c1") {
      const std::string tok = scalar_only();
      cfg.base.afdm.c1 = tok == "auto" ? -1.0 : to_double(tok, line, key);
    } else if (key == "c2") {
      cfg.base.afdm.c2 = to_double(scalar_only(), line, key);
    } else if (key == "delta_f") {
      cfg.base.afdm.delta_f = to_double(scalar_only(), line, key);
    } else if (key == "f_c") {
      cfg.base.afdm.f_c = to_double(scalar_only(), line, key);
    } else if (key == "c_light") {
      cfg.base.afdm.c_light = to_double(scalar_only(), line, key);
    } else if (key == "k_v") {
      cfg.base.afdm.k_v = static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "num_paths") {
      for (const auto& t : list)
        cfg.axes.num_paths.push_back(static_cast<int>(to_ll(t, line, key)));
      cfg.base.num_paths = cfg.axes.num_paths.front();
      if (!multi) cfg.axes.num_paths.clear();
    } else if (key == "est_num_paths") {
      for (const auto& t : list)
        cfg.axes.est_num_paths.push_back(static_cast<int>(to_ll(t, line, key)));
      cfg.base.est_num_paths = cfg.axes.est_num_paths.front();
      if (!multi) cfg.axes.est_num_paths.clear();
    } else if (key == "shape_m") {
      for (const auto& t : list)
        cfg.axes.shape_m.push_back(to_double(t, line, key));
      cfg.base.shape_m = cfg.axes.shape_m.front();
      if (!multi) cfg.axes.shape_m.clear();
    } else if (key == "velocity_kmh") {
      for (const auto& t : list)
        cfg.axes.velocity_kmh.push_back(to_double(t, line, key));
      cfg.base.velocity_kmh = cfg.axes.velocity_kmh.front();
      if (!multi) cfg.axes.velocity_kmh.clear();
    } else if (key == "snr_db") {
      for (const auto& t : list)
        cfg.axes.snr_db.push_back(to_double(t, line, key));
      cfg.base.snr_db = cfg.axes.snr_db.front();
      if (!multi) cfg.axes.snr_db.clear();
    } else if (key == "g0") {
      cfg.base.g0 = to_double(scalar_only(), line, key);
    } else if (key == "d0_true") {
      cfg.base.d0_true = to_double(scalar_only(), line, key);
    } else if (key == "fading_exp_los") {
      cfg.base.fading_exp_los = to_double(scalar_only(), line, key);
    } else if (key == "fading_exp_nlos") {
      cfg.base.fading_exp_nlos = to_double(scalar_only(), line, key);
    } else if (key == "tap_min") {
      cfg.base.tap_min = static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "tap_max") {
      cfg.base.tap_max = static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "trials") {
      cfg.base.trials = static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "seed") {
      cfg.base.seed = to_u64(scalar_only(), line, key);
    } else if (key == "crb_draws") {
      cfg.base.crb_draws = static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "eps1") {
      cfg.base.solver.eps1 = to_double(scalar_only(), line, key);
    } else if (key == "eps2") {
      cfg.base.solver.eps2 = to_double(scalar_only(), line, key);
    } else if (key == "max_iter_ec") {
      cfg.base.solver.max_iter_ec =
          static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "max_iter_em") {
      cfg.base.solver.max_iter_em =
          static_cast<int>(to_ll(scalar_only(), line, key));
    } else if (key == "damping") {
      cfg.base.solver.damping = to_double(scalar_only(), line, key);
    } else if (key == "relinearize") {
      cfg.base.solver.relinearize = to_bool(scalar_only(), line, key);
    } else if (key == "lambda_min") {
      cfg.base.solver.lambda_min = to_double(scalar_only(), line, key);
    } else if (key == "lambda_max") {
      cfg.base.solver.lambda_max = to_double(scalar_only(), line, key);
    } else if (key == "d0_init") {
      cfg.base.solver.d0_init = to_double(scalar_only(), line, key);
    } else if (key == "d0_lower") {
      cfg.base.solver.d0_lower = to_double(scalar_only(), line, key);
    } else if (key == "d0_upper") {
      cfg.base.solver.d0_upper = to_double(scalar_only(), line, key);
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  try {
    return parse_config(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string serialize_config(const SweepConfig& cfg) {
  std::ostringstream os;
  const auto& b = cfg.base;
  os << "n_sub = " << b.afdm.n_sub << "\n";
  os << "c1 = " << (b.afdm.c1 < 0.0 ? std::string("auto") : fmt(b.afdm.c1))
     << "\n";
  os << "c2 = " << fmt(b.afdm.c2) << "\n";
  os << "delta_f = " << fmt(b.afdm.delta_f) << "\n";
  os << "f_c = " << fmt(b.afdm.f_c) << "\n";
  os << "c_light = " << fmt(b.afdm.c_light) << "\n";
  os << "k_v = " << b.afdm.k_v << "\n";
  os << "num_paths = "
     << (cfg.axes.num_paths.empty()
             ? std::to_string(b.num_paths)
             : join(cfg.axes.num_paths,
                    [](int v) { return std::to_string(v); }))
     << "\n";
  os << "est_num_paths = "
     << (cfg.axes.est_num_paths.empty()
             ? std::to_string(b.est_num_paths)
             : join(cfg.axes.est_num_paths,
                    [](int v) { return std::to_string(v); }))
     << "\n";
  os << "shape_m = "
     << (cfg.axes.shape_m.empty() ? fmt(b.shape_m)
                                  : join(cfg.axes.shape_m, fmt))
     << "\n";
  os << "velocity_kmh = "
     << (cfg.axes.velocity_kmh.empty() ? fmt(b.velocity_kmh)
                                       : join(cfg.axes.velocity_kmh, fmt))
     << "\n";
  os << "snr_db = "
     << (cfg.axes.snr_db.empty() ? fmt(b.snr_db) : join(cfg.axes.snr_db, fmt))
     << "\n";
  os << "g0 = " << fmt(b.g0) << "\n";
  os << "d0_true = " << fmt(b.d0_true) << "\n";
  os << "fading_exp_los = " << fmt(b.fading_exp_los) << "\n";
  os << "fading_exp_nlos = " << fmt(b.fading_exp_nlos) << "\n";
  os << "tap_min = " << b.tap_min << "\n";
  os << "tap_max = " << b.tap_max << "\n";
  os << "trials = " << b.trials << "\n";
  os << "seed = " << b.seed << "\n";
  os << "crb_draws = " << b.crb_draws << "\n";
  os << "eps1 = " << fmt(b.solver.eps1) << "\n";
  os << "eps2 = " << fmt(b.solver.eps2) << "\n";
  os << "max_iter_ec = " << b.solver.max_iter_ec << "\n";
  os << "max_iter_em = " << b.solver.max_iter_em << "\n";
  os << "damping = " << fmt(b.solver.damping) << "\n";
  os << "relinearize = " << (b.solver.relinearize ? "true" : "false") << "\n";
  os << "lambda_min = " << fmt(b.solver.lambda_min) << "\n";
  os << "lambda_max = " << fmt(b.solver.lambda_max) << "\n";
  os << "d0_init = " << fmt(b.solver.d0_init) << "\n";
  os << "d0_lower = " << fmt(b.solver.d0_lower) << "\n";
  os << "d0_upper = " << fmt(b.solver.d0_upper) << "\n";
  return os.str();
}

std::vector<GridPoint> expand_grid(const SweepConfig& cfg) {
  const auto& a = cfg.axes;
  const std::vector<int> ls =
      a.num_paths.empty() ? std::vector<int>{cfg.base.num_paths} : a.num_paths;
  const std::vector<double> ms =
      a.shape_m.empty() ? std::vector<double>{cfg.base.shape_m} : a.shape_m;
  const std::vector<double> vs = a.velocity_kmh.empty()
                                     ? std::vector<double>{cfg.base.velocity_kmh}
                                     : a.velocity_kmh;
  const std::vector<int> les = a.est_num_paths.empty()
                                   ? std::vector<int>{cfg.base.est_num_paths}
                                   : a.est_num_paths;
  const std::vector<double> snrs =
      a.snr_db.empty() ? std::vector<double>{cfg.base.snr_db} : a.snr_db;

  std::vector<GridPoint> grid;
  grid.reserve(ls.size() * ms.size() * vs.size() * les.size() * snrs.size());
  int scenario_id = 0;
  std::uint64_t geom_key = 0;
  for (int l : ls)
    for (double m : ms)
      for (double v : vs) {
        for (int le : les)
          for (double snr : snrs) {
            GridPoint p;
            p.scn = cfg.base;
            p.scn.num_paths = l;
            p.scn.shape_m = m;
            p.scn.velocity_kmh = v;
            p.scn.est_num_paths = le;
            p.scn.snr_db = snr;
            p.scn.validate();
            p.scenario_id = scenario_id++;
            p.geom_key = geom_key;
            grid.push_back(std::move(p));
          }
        ++geom_key;
      }
  return grid;
}

}  // namespace afdmsense
