#include "nbscatter/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nbs {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int nd) {
  os << "# nbscatter trajectory v1\n";
  os << "tau,t,rho,v";
  for (int k = 0; k < nd; ++k) os << ",s" << k;
  for (int k = 0; k < nd; ++k) os << ",w" << k;
  os << "\n";
  for (const auto& smp : traj.samples) {
    os << format_double(smp.tau) << ',' << format_double(smp.t) << ','
       << format_double(smp.state.rho) << ',' << format_double(smp.state.v);
    for (int k = 0; k < nd; ++k) os << ',' << format_double(smp.state.s[k]);
    for (int k = 0; k < nd; ++k) os << ',' << format_double(smp.state.w[k]);
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is, int nd) {
  Trajectory traj;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("tau,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != 4 + 2 * nd)
      throw InvalidState("read_trajectory_csv: wrong column count");
    TrajectorySample smp;
    smp.tau = vals[0];
    smp.t = vals[1];
    smp.state.rho = vals[2];
    smp.state.v = vals[3];
    smp.state.s = Vec(nd);
    smp.state.w = Vec(nd);
    for (int k = 0; k < nd; ++k) smp.state.s[k] = vals[static_cast<size_t>(4 + k)];
    for (int k = 0; k < nd; ++k)
      smp.state.w[k] = vals[static_cast<size_t>(4 + nd + k)];
    traj.samples.push_back(std::move(smp));
  }
  return traj;
}

Json trajectory_metadata(const Trajectory& traj) {
  return Json{{"termination", termination_name(traj.termination)},
              {"energy", traj.h},
              {"energy_drift", traj.energy_drift},
              {"max_rho", traj.max_rho},
              {"max_shape_potential", traj.max_shape_potential},
              {"min_pair_distance", traj.min_pair_distance},
              {"samples", traj.samples.size()},
              {"track_time", traj.track_time},
              {"tolerances",
               {{"rel", traj.tol.rel},
                {"abs", traj.tol.abs},
                {"energy", traj.tol.energy},
                {"rho_eq", traj.tol.rho_eq},
                {"w_eq", traj.tol.w_eq},
                {"v_eq", traj.tol.v_eq}}}};
}

Json to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const Json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

Json to_json(const ManifoldParams& mp) {
  return Json{{"s0", to_json(mp.eq.s0)},
              {"v0", mp.eq.v0},
              {"s1", to_json(mp.s1)},
              {"rho1", mp.rho1}};
}

ManifoldParams manifold_from_json(const Json& j) {
  ManifoldParams mp;
  mp.eq.s0 = vec_from_json(j.at("s0"));
  mp.eq.v0 = j.at("v0").get<double>();
  mp.s1 = vec_from_json(j.at("s1"));
  mp.rho1 = j.at("rho1").get<double>();
  return mp;
}

Json to_json(const ChazyParameters& cp) {
  return Json{{"A", to_json(cp.A)},
              {"B", to_json(cp.B)},
              {"C", to_json(cp.C)},
              {"direction", cp.direction == Direction::Future ? "future" : "past"}};
}

Json to_json(const OrbitParameter& gamma) {
  return Json{{"rho1", gamma.rho1}, {"shifted_s1", to_json(gamma.shifted_s1)}};
}

Json to_json(const ScatteringResult& res) {
  Json j{{"status", scatter_status_name(res.status)},
         {"past", to_json(res.past)},
         {"diagnostics",
          {{"min_pair_distance", res.diagnostics.min_pair_distance},
           {"max_rho", res.diagnostics.max_rho},
           {"max_shape_potential", res.diagnostics.max_shape_potential},
           {"energy_drift", res.diagnostics.energy_drift},
           {"tau_end", res.diagnostics.tau_end}}}};
  if (!res.message.empty()) j["message"] = res.message;
  if (res.status == ScatterStatus::Ok) {
    j["future"] = to_json(res.future);
    j["past_gamma"] = to_json(res.past_gamma);
    j["future_gamma"] = to_json(res.future_gamma);
    if (res.past_chazy) j["past_chazy"] = to_json(*res.past_chazy);
    if (res.future_chazy) j["future_chazy"] = to_json(*res.future_chazy);
  }
  return j;
}

ScatteringResult scattering_from_json(const Json& j) {
  ScatteringResult res;
  std::string st = j.at("status").get<std::string>();
  if (st == "ok") res.status = ScatterStatus::Ok;
  else if (st == "singular") res.status = ScatterStatus::Singular;
  else if (st == "no_convergence") res.status = ScatterStatus::NoConvergence;
  else res.status = ScatterStatus::SeedScale;
  res.past = manifold_from_json(j.at("past"));
  if (j.contains("future")) res.future = manifold_from_json(j.at("future"));
  if (j.contains("past_gamma")) {
    res.past_gamma.rho1 = j["past_gamma"].at("rho1").get<double>();
    res.past_gamma.shifted_s1 = vec_from_json(j["past_gamma"].at("shifted_s1"));
  }
  if (j.contains("future_gamma")) {
    res.future_gamma.rho1 = j["future_gamma"].at("rho1").get<double>();
    res.future_gamma.shifted_s1 =
        vec_from_json(j["future_gamma"].at("shifted_s1"));
  }
  const Json& d = j.at("diagnostics");
  res.diagnostics.min_pair_distance = d.at("min_pair_distance").get<double>();
  res.diagnostics.max_rho = d.at("max_rho").get<double>();
  res.diagnostics.max_shape_potential =
      d.at("max_shape_potential").get<double>();
  res.diagnostics.energy_drift = d.at("energy_drift").get<double>();
  res.diagnostics.tau_end = d.at("tau_end").get<double>();
  if (j.contains("message")) res.message = j["message"].get<std::string>();
  return res;
}

}  // namespace nbs
