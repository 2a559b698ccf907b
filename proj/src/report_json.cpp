#include "sketchbound/report_json.hpp"

namespace sketchbound {

namespace {

void put(Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

}  // namespace

Json to_json(const Lemma6Constants& c) {
  Json j;
  j["c_dep_spectral"] = c.c_dep_spectral;
  j["c_dep_frobenius"] = c.c_dep_frobenius;
  j["c_sp"] = c.c_sp;
  j["c_f"] = c.c_f;
  j["c_tot_spectral"] = c.c_tot_spectral;
  j["c_tot_frobenius_sq"] = c.c_tot_frobenius_sq;
  return j;
}

Json to_json(const DeterministicBoundReport& r) {
  Json j;
  j["norm"] = std::string(to_string(r.norm));
  j["k"] = r.k;
  j["lhs_general_metric"] = r.lhs_general_metric;
  j["bound_sine"] = r.bound_sine;
  j["bound_tangent"] = r.bound_tangent;
  j["bound"] = r.bound;
  return j;
}

Json to_json(const ExpectationBoundReport& r) {
  Json j;
  j["variant"] = std::string(to_string(r.variant));
  j["norm"] = std::string(to_string(r.norm));
  j["k"] = r.k;
  j["p"] = r.p;
  j["mean_term"] = r.mean_term;
  put(j, "a_k", r.a_k);
  put(j, "b_k", r.b_k);
  put(j, "c_k", r.c_k);
  put(j, "d_k", r.d_k);
  put(j, "c_hat_k", r.c_hat_k);
  put(j, "d_hat_k", r.d_hat_k);
  j["constants_head"] = to_json(r.head);
  j["constants_identity"] = to_json(r.identity);
  j["bound"] = r.bound;
  return j;
}

Json to_json(const RsvdBoundReport& r) {
  Json j;
  j["variant"] = std::string(to_string(r.variant));
  j["norm"] = std::string(to_string(r.norm));
  j["k"] = r.k;
  j["p"] = r.p;
  j["q"] = r.q;
  put(j, "a_k", r.a_k);
  put(j, "b_k", r.b_k);
  put(j, "c_k", r.c_k);
  put(j, "d_k", r.d_k);
  put(j, "c_hat_k", r.c_hat_k);
  put(j, "d_hat_k", r.d_hat_k);
  if (r.ell) j["ell"] = *r.ell;
  j["bound"] = r.bound;
  return j;
}

Json to_json(const EmpiricalResult& r, bool with_records) {
  Json j;
  j["mean"] = r.mean;
  j["std"] = r.std;
  j["trials_used"] = r.records.size();
  j["excluded"] = r.excluded;
  if (with_records) {
    Json recs = Json::array();
    for (const auto& t : r.records) {
      Json o;
      o["trial_index"] = t.trial_index;
      o["k"] = t.k;
      o["p"] = t.p;
      o["q"] = t.q;
      o["norm"] = std::string(to_string(t.norm));
      o["metric_value"] = t.metric_value;
      o["residual_full"] = t.residual_full;
      o["residual_deflated"] = t.residual_deflated;
      recs.push_back(o);
    }
    j["records"] = recs;
  }
  return j;
}

}  // namespace sketchbound
