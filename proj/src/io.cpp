#include "safeadapt/io.hpp"

#include "safeadapt/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace safeadapt {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec json_vec(const json& j, const std::string& key) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidScenario, key + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Eigen::Vector2d json_vec2(const json& j, const std::string& key) {
  const Vec v = json_vec(j, key);
  if (v.size() != 2) throw Error(ErrorCode::InvalidScenario, key + ": expected 2 entries");
  return v;
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidScenario, std::string(key) + ": " + e.what());
  }
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidScenario, std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidScenario, "scenario must be an object");
  Scenario s;
  if (j.contains("problem")) {
    const std::string p = j["problem"].get<std::string>();
    if (p == "p1") s = default_p1();
    else if (p == "p2") s = default_p2();
    else throw Error(ErrorCode::InvalidScenario, "problem: expected p1 or p2");
  }
  read(j, "name", s.name);
  read(j, "m_true", s.m_true);
  read(j, "k_true", s.k_true);
  read(j, "b_true", s.b_true);
  read(j, "k_hat0", s.k_hat0);
  read(j, "b_hat0", s.b_hat0);
  read(j, "m_hat0", s.m_hat0);
  read(j, "k_lo", s.k_lo);
  read(j, "k_hi", s.k_hi);
  read(j, "b_lo", s.b_lo);
  read(j, "b_hi", s.b_hi);
  read(j, "m_lo", s.m_lo);
  read(j, "m_hi", s.m_hi);
  if (j.contains("pillar_center")) s.pillar_center = json_vec2(j["pillar_center"], "pillar_center");
  read(j, "pillar_radius", s.pillar_radius);
  if (j.contains("x0")) s.x0 = json_vec(j["x0"], "x0");
  if (j.contains("xm0")) s.xm0 = json_vec(j["xm0"], "xm0");
  if (j.contains("trajectory")) {
    const json& t = j["trajectory"];
    if (t.contains("start")) s.trajectory.start = json_vec2(t["start"], "trajectory.start");
    if (t.contains("goal")) s.trajectory.goal = json_vec2(t["goal"], "trajectory.goal");
    read(t, "t_start", s.trajectory.t_start);
    read(t, "duration", s.trajectory.duration);
  }
  read(j, "horizon", s.horizon);
  read(j, "control_rate", s.control_rate);
  read(j, "substeps", s.substeps);
  if (j.contains("hold")) {
    const std::string h = j["hold"].get<std::string>();
    if (h == "input") s.hold = HoldMode::Input;
    else if (h == "reference") s.hold = HoldMode::Reference;
    else throw Error(ErrorCode::InvalidScenario, "hold: expected input or reference");
  }
  read(j, "gamma_theta", s.gamma_theta);
  read(j, "gamma_lambda", s.gamma_lambda);
  read(j, "gamma_theta_s", s.gamma_theta_s);
  read(j, "gamma_lambda_s", s.gamma_lambda_s);
  read(j, "alpha_1", s.alpha_1);
  read(j, "alpha_r", s.alpha_r);
  read(j, "delta", s.delta);
  read(j, "ebsf_gauge_kappa", s.ebsf_gauge_kappa);
  if (j.contains("K") && !j["K"].is_null()) {
    const json& k = j["K"];
    if (!k.is_array() || k.empty()) throw Error(ErrorCode::InvalidScenario, "K: expected rows");
    Mat K(static_cast<Eigen::Index>(k.size()), static_cast<Eigen::Index>(k[0].size()));
    for (std::size_t r = 0; r < k.size(); ++r) {
      const Vec row = json_vec(k[r], "K");
      if (row.size() != K.cols()) throw Error(ErrorCode::InvalidScenario, "K: ragged rows");
      K.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    s.K = K;
  }
  read(j, "lqr_state_weight", s.lqr_state_weight);
  read(j, "lqr_input_weight", s.lqr_input_weight);
  read(j, "lyapunov_q", s.lyapunov_q);
  read(j, "smid_period", s.smid_period);
  read(j, "smid_confidence", s.smid_confidence);
  read(j, "smid_sigma_scale", s.smid_sigma_scale);
  if (j.contains("smid_measurement")) {
    const std::string m = j["smid_measurement"].get<std::string>();
    if (m == "proxy") s.smid_measurement = SmidMeasurement::Proxy;
    else if (m == "plant") s.smid_measurement = SmidMeasurement::Plant;
    else throw Error(ErrorCode::InvalidScenario, "smid_measurement: expected proxy or plant");
  }
  read(j, "exact_initial_params", s.exact_initial_params);
  read(j, "auto_adjust_initial", s.auto_adjust_initial);
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["problem"] = to_string(s.problem);
  j["m_true"] = s.m_true;
  j["k_true"] = s.k_true;
  j["b_true"] = s.b_true;
  j["k_hat0"] = s.k_hat0;
  j["b_hat0"] = s.b_hat0;
  j["m_hat0"] = s.m_hat0;
  j["k_lo"] = s.k_lo;
  j["k_hi"] = s.k_hi;
  j["b_lo"] = s.b_lo;
  j["b_hi"] = s.b_hi;
  j["m_lo"] = s.m_lo;
  j["m_hi"] = s.m_hi;
  j["pillar_center"] = vec_json(s.pillar_center);
  j["pillar_radius"] = s.pillar_radius;
  j["x0"] = vec_json(s.x0);
  j["xm0"] = vec_json(s.xm0);
  j["trajectory"] = {{"start", vec_json(s.trajectory.start)},
                     {"goal", vec_json(s.trajectory.goal)},
                     {"t_start", s.trajectory.t_start},
                     {"duration", s.trajectory.duration}};
  j["horizon"] = s.horizon;
  j["control_rate"] = s.control_rate;
  j["substeps"] = s.substeps;
  j["hold"] = s.hold == HoldMode::Input ? "input" : "reference";
  j["gamma_theta"] = s.gamma_theta;
  j["gamma_lambda"] = s.gamma_lambda;
  j["gamma_theta_s"] = s.gamma_theta_s;
  j["gamma_lambda_s"] = s.gamma_lambda_s;
  j["alpha_1"] = s.alpha_1;
  j["alpha_r"] = s.alpha_r;
  j["delta"] = s.delta;
  j["ebsf_gauge_kappa"] = s.ebsf_gauge_kappa;
  if (s.K) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < s.K->rows(); ++r) rows.push_back(vec_json(s.K->row(r).transpose()));
    j["K"] = rows;
  } else {
    j["K"] = nullptr;
  }
  j["lqr_state_weight"] = s.lqr_state_weight;
  j["lqr_input_weight"] = s.lqr_input_weight;
  j["lyapunov_q"] = s.lyapunov_q;
  j["smid_period"] = s.smid_period;
  j["smid_confidence"] = s.smid_confidence;
  j["smid_sigma_scale"] = s.smid_sigma_scale;
  j["smid_measurement"] = s.smid_measurement == SmidMeasurement::Proxy ? "proxy" : "plant";
  j["exact_initial_params"] = s.exact_initial_params;
  j["auto_adjust_initial"] = s.auto_adjust_initial;
  return j.dump(2);
}

Scenario load_scenario(const std::string& name_or_path) {
  if (name_or_path == "default_p1") return default_p1();
  if (name_or_path == "default_p2") return default_p2();
  std::ifstream in(name_or_path);
  if (!in) throw Error(ErrorCode::InvalidScenario, "cannot open scenario '" + name_or_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

namespace {

void vec_header(std::vector<std::string>& cols, const std::string& name, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) cols.push_back(name + "_" + std::to_string(i));
}

std::vector<std::string> header_columns(const Trace& trace) {
  std::vector<std::string> cols{"t"};
  const TraceRow& r = trace.rows.front();
  vec_header(cols, "x", r.x.size());
  vec_header(cols, "x_m", r.x_m.size());
  vec_header(cols, "u", r.u.size());
  vec_header(cols, "r_star", r.r_star.size());
  vec_header(cols, "r_s", r.r_s.size());
  for (const char* c : {"h_x", "h_xm", "hr_x", "delta_ebsb", "beta_ebsf"}) cols.emplace_back(c);
  vec_header(cols, "theta_hat", r.theta_hat.size());
  vec_header(cols, "lambda_hat", r.lambda_hat.size());
  cols.emplace_back("V");
  vec_header(cols, "theta_lo", r.theta_lo.size());
  vec_header(cols, "theta_hi", r.theta_hi.size());
  vec_header(cols, "lambda_lo", r.lambda_lo.size());
  vec_header(cols, "lambda_hi", r.lambda_hi.size());
  cols.emplace_back("jitter");
  return cols;
}

void put(std::ostream& os, double v) { os << ',' << v; }
void put(std::ostream& os, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << v(i);
}

}  // namespace

std::string trace_csv_header(const Trace& trace) {
  if (trace.rows.empty()) return "t";
  std::string out;
  for (const auto& c : header_columns(trace)) out += (out.empty() ? "" : ",") + c;
  return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << trace_csv_header(trace) << '\n';
  os << std::setprecision(17);
  for (const auto& r : trace.rows) {
    os << r.t;
    put(os, r.x);
    put(os, r.x_m);
    put(os, r.u);
    put(os, r.r_star);
    put(os, r.r_s);
    put(os, r.h_x);
    put(os, r.h_xm);
    put(os, r.hr_x);
    put(os, r.delta_ebsb);
    put(os, r.beta_ebsf);
    put(os, r.theta_hat);
    put(os, r.lambda_hat);
    put(os, r.V);
    put(os, r.theta_lo);
    put(os, r.theta_hi);
    put(os, r.lambda_lo);
    put(os, r.lambda_hi);
    put(os, r.jitter);
    os << '\n';
  }
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  write_file_atomic(path, os.str());
}

Trace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::InvalidScenario, "empty trace file");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  std::map<std::string, int> count;
  for (const auto& c : cols) {
    const auto pos = c.rfind('_');
    if (pos != std::string::npos && std::isdigit(static_cast<unsigned char>(c[pos + 1])))
      count[c.substr(0, pos)]++;
  }
  auto dim = [&](const std::string& n) { return count.count(n) ? count[n] : 0; };
  Trace trace;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) v.push_back(std::stod(c));
    if (v.size() != cols.size()) throw Error(ErrorCode::InvalidScenario, "ragged trace row");
    std::size_t i = 0;
    auto vec = [&](const std::string& n) {
      Vec out(dim(n));
      for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = v[i++];
      return out;
    };
    TraceRow r;
    r.t = v[i++];
    r.x = vec("x");
    r.x_m = vec("x_m");
    r.u = vec("u");
    r.r_star = vec("r_star");
    r.r_s = vec("r_s");
    r.h_x = v[i++];
    r.h_xm = v[i++];
    r.hr_x = v[i++];
    r.delta_ebsb = v[i++];
    r.beta_ebsf = v[i++];
    r.theta_hat = vec("theta_hat");
    r.lambda_hat = vec("lambda_hat");
    r.V = v[i++];
    r.theta_lo = vec("theta_lo");
    r.theta_hi = vec("theta_hi");
    r.lambda_lo = vec("lambda_lo");
    r.lambda_hi = vec("lambda_hi");
    r.jitter = v[i++];
    trace.rows.push_back(std::move(r));
  }
  if (trace.rows.size() >= 2) trace.dt = trace.rows[1].t - trace.rows[0].t;
  return trace;
}

Trace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidScenario, "cannot open trace '" + path + "'");
  return read_trace_csv(in);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidScenario, "cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace safeadapt
