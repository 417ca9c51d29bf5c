#include "ipbt/report.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipbt/errors.hpp"
#include "ipbt/refine.hpp"
#include "ipbt/rsw.hpp"

namespace ipbt {

using io::Json;
using io::to_json;

namespace {

// Per-type direct LPs grow quickly; above this many cells the cross-check is skipped.
constexpr int kCrosscheckMaxCells = 16;

Json types_json(const std::vector<int>& types) {
  Json j = Json::array();
  for (int x : types) j.push_back(x);
  return j;
}

Json certificate_json(const RswCertificate& c) {
  return Json{{"kappa", to_json(c.kappa)}, {"pi1", to_json(c.pi1)}, {"lambda", to_json(c.lambda)}};
}

Json afp_json(const std::vector<AlmostFixedPrice>& menus) {
  Json j = Json::array();
  for (const auto& m : menus) {
    Json e{{"threshold", m.threshold},
           {"interior_q", to_json(m.interior_q)},
           {"interior_t", to_json(m.interior_t)}};
    e["price"] = m.price ? to_json(*m.price) : Json(nullptr);
    j.push_back(std::move(e));
  }
  return j;
}

Json menus_json(const std::vector<FixedPriceMenu>& menus) {
  Json j = Json::array();
  for (const auto& m : menus) {
    j.push_back(Json{{"threshold", m.threshold},
                     {"price", m.price ? to_json(*m.price) : Json(nullptr)}});
  }
  return j;
}

Json hits_json(const std::vector<SpotCheckHit>& hits) {
  Json j = Json::array();
  for (const auto& h : hits) {
    j.push_back(Json{{"support", types_json(h.support)}, {"gain", to_json(h.gain)}});
  }
  return j;
}

Json polygon_json(const PayoffPolygon& poly) {
  Json vertices = Json::array();
  for (const auto& v : poly.vertices) {
    vertices.push_back(Json{{"u1", to_json(v.u1)}, {"u2", to_json(v.u2)},
                            {"witness", to_json(v.witness)}});
  }
  Json facets = Json::array();
  for (const auto& f : poly.facets) {
    facets.push_back(Json{{"a", to_json(f.a)}, {"b", to_json(f.b)}, {"c", to_json(f.c)},
                          {"duals", to_json(f.duals)}});
  }
  return Json{{"region", "feasible allocations weakly dominating the relaxed-problem payoffs"},
              {"vertices", std::move(vertices)},
              {"facets", std::move(facets)},
              {"support_solves", poly.support_solves}};
}

Json constraint_json(const ConstraintReport& rep) {
  Json v = Json::array();
  for (const auto& s : rep.violations) v.push_back(s);
  return Json{{"feasible", rep.feasible},
              {"seller_bic", rep.seller_bic_ok},
              {"seller_iir", rep.seller_iir_ok},
              {"buyer_bic", rep.buyer_bic_ok},
              {"buyer_iir", rep.buyer_iir_ok},
              {"buyer_epic", rep.buyer_epic_ok},
              {"buyer_epir", rep.buyer_epir_ok},
              {"seller_bic_slack", to_json(rep.seller_bic)},
              {"seller_iir_slack", to_json(rep.seller_iir)},
              {"buyer_bic_slack", to_json(rep.buyer_bic)},
              {"buyer_iir_slack", to_json(rep.buyer_iir)},
              {"violations", std::move(v)}};
}

Json rsw_json(const Environment& env, const RswResult& r) {
  return Json{{"allocation", to_json(r.allocation)},
              {"certificate", certificate_json(r.certificate)},
              {"seller_payoffs", to_json(r.seller_payoffs)},
              {"buyer_expost_payoffs", to_json(buyer_expost_payoffs(env, r.allocation))},
              {"objective", to_json(r.objective)},
              {"lp", Json{{"pivots", r.pivots}, {"rows", r.lp_rows}, {"cols", r.lp_cols}}}};
}

void add_rsw_checks(const Environment& env, const RswResult& r, const RunOptions& options,
                    Json& out, std::vector<PropertyCheck>& checks) {
  // solve_rsw throws unless every structural post-check passes.
  checks.push_back({"rsw-post-verification", true, ""});
  if (is_regular(derive(env))) {
    try {
      out["almost_fixed_prices"] = afp_json(extract_almost_fixed_prices(env, r.allocation));
      checks.push_back({"rsw-almost-fixed-prices", true, ""});
    } catch (const VerificationError& e) {
      checks.push_back({"rsw-almost-fixed-prices", false, e.what()});
    }
  }
  if (options.weights) {
    const auto u = solve_rsw_weighted(env, *options.weights, options.lp);
    out["weighted_seller_payoffs"] = to_json(u);
    checks.push_back({"weighted-objective-same-payoffs", u == r.seller_payoffs, ""});
  }
  if (env.x_size() * env.y_size() <= kCrosscheckMaxCells) {
    const auto u = rsw_per_type_crosscheck(env, options.lp);
    out["per_type_maxima"] = to_json(u);
    checks.push_back({"rsw-attains-every-type-maximum", u == r.seller_payoffs, ""});
  }
}

RunReport start(const std::string& command, const Environment& env) {
  RunReport r;
  r.command = command;
  r.digest = io::environment_digest(env);
  r.outputs = Json::object();
  return r;
}

template <class Fn>
RunReport timed(const RunOptions& options, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r = fn();
  if (options.timing) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return r;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("OutputError", "cannot write " + path.string());
  f << text;
}

}  // namespace

bool RunReport::verified() const {
  for (const auto& c : verification) {
    if (!c.passed) return false;
  }
  return true;
}

Json RunReport::to_json() const {
  Json checks = Json::array();
  for (const auto& c : verification) {
    checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  Json j{{"command", command},
         {"environment_digest", digest},
         {"outputs", outputs},
         {"verification", std::move(checks)}};
  if (seconds) j["seconds"] = *seconds;
  return j;
}

RunReport cmd_solve(const std::string& kind, const Environment& env, const RunOptions& options) {
  return timed(options, [&] {
    RunReport r = start("solve " + kind, env);
    if (kind == "rsw") {
      RswOptions ro;
      ro.lp = options.lp;
      const auto rsw = solve_rsw(env, ro);
      r.outputs = rsw_json(env, rsw);
      add_rsw_checks(env, rsw, options, r.outputs, r.verification);
    } else if (kind == "full-info") {
      const auto full = solve_full_information(env);
      r.outputs = Json{{"allocation", to_json(full.allocation)},
                       {"menus", menus_json(full.menus)},
                       {"seller_payoffs", to_json(full.seller_payoffs)}};
      const auto rep = check_constraints(env, full.allocation, Belief::prior(env));
      r.verification.push_back({"full-information-buyer-ex-post-ic", rep.buyer_epic_ok, ""});
      r.verification.push_back({"full-information-buyer-ex-post-ir", rep.buyer_epir_ok, ""});
    } else if (kind == "ex-ante") {
      ExAnteOptions eo;
      eo.seller_iir = options.seller_iir;
      eo.lp = options.lp;
      const auto ea = solve_ex_ante_optimal(env, eo);
      r.outputs = Json{{"allocation", to_json(ea.allocation)},
                       {"seller_payoffs", to_json(ea.seller_payoffs)},
                       {"value", to_json(ea.value)},
                       {"seller_iir", options.seller_iir}};
      r.verification.push_back({"ex-ante-feasible", true, ""});
    } else if (kind == "efficient") {
      const auto eff = efficient_rule(env);
      r.outputs = Json{{"allocation", to_json(eff)}};
    } else {
      throw InputError("UnknownCommand", "unknown solve kind " + kind);
    }
    return r;
  });
}

RunReport cmd_check(const std::string& kind, const Environment& env,
                    const std::optional<Allocation>& alloc, const RunOptions& options) {
  return timed(options, [&] {
    RunReport r = start("check " + kind, env);
    auto need_alloc = [&]() -> const Allocation& {
      if (!alloc) throw InputError("MissingAllocation", "check " + kind + " needs --alloc");
      return *alloc;
    };
    if (kind == "feasible") {
      const auto rep = check_constraints(env, need_alloc(), Belief::prior(env));
      r.outputs = Json{{"verdict", rep.feasible},
                       {"seller_payoffs", to_json(seller_payoffs(env, *alloc))},
                       {"constraints", constraint_json(rep)}};
    } else if (kind == "core") {
      CoreOptions co;
      co.lp = options.lp;
      const auto core = check_core(env, need_alloc(), co);
      r.outputs = Json{{"verdict", core.in_core}, {"coalitions_checked", core.coalitions_checked}};
      if (!core.in_core) {
        r.outputs["blocking_coalition"] = types_json(core.blocking_coalition);
        r.outputs["blocking_allocation"] = to_json(*core.blocking_allocation);
        r.outputs["blocking_payoffs"] = to_json(seller_payoffs(env, *core.blocking_allocation));
      }
    } else if (kind == "strong-solution") {
      const auto s = check_strong_solution(env, options.lp);
      r.outputs = Json{{"verdict", s.strong}, {"rsw", rsw_json(env, s.rsw)}};
      if (s.dominating) {
        r.outputs["dominating_allocation"] = to_json(*s.dominating);
        r.outputs["dominating_payoffs"] = to_json(seller_payoffs(env, *s.dominating));
      }
    } else if (kind == "fgp") {
      const auto f = check_fgp_exists(env, options.lp);
      r.outputs = Json{{"verdict", f.exists},
                       {"spot_check_hits", hits_json(f.spot_check_hits)},
                       {"spot_check_agrees", f.corroborated}};
      r.outputs["allocation"] = f.allocation ? to_json(*f.allocation) : Json(nullptr);
      r.verification.push_back({"fgp-spot-check-consistent",
                                !f.exists || f.spot_check_hits.empty(), ""});
    } else if (kind == "snp") {
      const auto s = check_snp_exists(env, options.lp);
      r.outputs = Json{{"verdict", s.exists},
                       {"payoff_gap_types", types_json(s.payoff_gap_types)},
                       {"spot_check_hits", hits_json(s.spot_check_hits)},
                       {"spot_check_agrees", s.corroborated}};
      r.outputs["allocation"] = s.allocation ? to_json(*s.allocation) : Json(nullptr);
      r.verification.push_back({"snp-spot-check-consistent",
                                !s.exists || s.spot_check_hits.empty(), ""});
    } else {
      throw InputError("UnknownCommand", "unknown check kind " + kind);
    }
    return r;
  });
}

RunReport cmd_report(const Environment& env, const RunOptions& options) {
  return timed(options, [&] {
    RunReport r = start("report", env);
    const auto cmp = payoff_comparison_report(env, options.lp);
    r.verification = cmp.checks;
    Json rsw = rsw_json(env, cmp.rsw);
    {
      std::vector<PropertyCheck> extra;
      add_rsw_checks(env, cmp.rsw, options, rsw, extra);
      for (auto& c : extra) {
        if (c.name != "rsw-almost-fixed-prices") r.verification.push_back(std::move(c));
      }
    }
    r.outputs["rsw"] = std::move(rsw);
    r.outputs["full_information"] = Json{{"allocation", to_json(cmp.full_info.allocation)},
                                         {"menus", menus_json(cmp.full_info.menus)},
                                         {"seller_payoffs", to_json(cmp.full_info.seller_payoffs)}};
    r.outputs["efficient"] = to_json(cmp.efficient);
    r.outputs["ex_ante"] = Json{{"allocation", to_json(cmp.ex_ante.allocation)},
                                {"seller_payoffs", to_json(cmp.ex_ante.seller_payoffs)},
                                {"value", to_json(cmp.ex_ante.value)}};
    r.outputs["ex_ante_from_full_information"] =
        cmp.ex_ante_from_full_info ? to_json(*cmp.ex_ante_from_full_info) : Json(nullptr);
    r.outputs["undersupply"] = to_json(cmp.undersupply);
    r.outputs["strict_undersupply_cells"] = cmp.strict_undersupply_cells;
    r.outputs["full_information_vs_efficient"] = to_json(cmp.full_info_vs_efficient);
    r.outputs["buyer_gap"] = to_json(cmp.buyer_gap);
    r.outputs["ex_ante_values"] = Json{{"rsw", to_json(cmp.exante_rsw)},
                                       {"optimal", to_json(cmp.exante_optimal)},
                                       {"full_information", to_json(cmp.exante_full_info)}};
    r.outputs["regular"] = cmp.regular;
    if (cmp.almost_fixed_prices) r.outputs["almost_fixed_prices"] = afp_json(*cmp.almost_fixed_prices);

    const auto strong = check_strong_solution(env, options.lp);
    const auto fgp = check_fgp_exists(env, options.lp);
    const auto snp = check_snp_exists(env, options.lp);
    Json checks{{"strong_solution", strong.strong},
                {"fgp", fgp.exists},
                {"snp", snp.exists},
                {"fgp_spot_check_agrees", fgp.corroborated},
                {"snp_spot_check_agrees", snp.corroborated}};
    r.verification.push_back({"fgp-iff-strong-solution", fgp.exists == strong.strong, ""});
    r.verification.push_back({"snp-implies-fgp", !snp.exists || fgp.exists, ""});
    r.verification.push_back(
        {"fgp-spot-check-consistent", !fgp.exists || fgp.spot_check_hits.empty(), ""});
    r.verification.push_back(
        {"snp-spot-check-consistent", !snp.exists || snp.spot_check_hits.empty(), ""});
    if (env.x_size() <= kMaxCoreTypes) {
      CoreOptions co;
      co.lp = options.lp;
      const auto core = check_core(env, cmp.rsw.allocation, co);
      checks["rsw_in_core"] = core.in_core;
      if (!core.in_core) checks["rsw_blocking_coalition"] = types_json(core.blocking_coalition);
    }
    r.outputs["checks"] = std::move(checks);

    std::optional<PayoffPolygon> poly;
    if (env.x_size() == 2) {
      poly = seller_payoff_set(env, options.lp);
      r.outputs["payoff_set"] = polygon_json(*poly);
    }

    if (options.csv_dir) {
      const std::filesystem::path dir(*options.csv_dir);
      std::filesystem::create_directories(dir);
      std::ostringstream plot;
      plot << "x,y,q_rsw,q_full_information,q_efficient\n";
      for (int x = 0; x < env.x_size(); ++x) {
        for (int y = 0; y < env.y_size(); ++y) {
          plot << x + 1 << ',' << y + 1 << ',' << cmp.rsw.allocation.q()(x, y) << ','
               << cmp.full_info.allocation.q()(x, y) << ',' << cmp.efficient.q()(x, y) << '\n';
        }
      }
      write_file(dir / "plot.csv", plot.str());
      if (poly) {
        std::ostringstream csv;
        csv << "u1,u2\n";
        for (const auto& v : poly->vertices) csv << v.u1 << ',' << v.u2 << '\n';
        write_file(dir / "polygon.csv", csv.str());
      }
    }
    return r;
  });
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return kExitInput;
  if (dynamic_cast<const PreconditionError*>(&e)) return kExitPrecondition;
  return kExitVerification;
}

RationalVector parse_weights(const std::string& text) {
  RationalVector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(Rational::parse(item));
    } catch (const std::invalid_argument&) {
      throw InputError("InvalidWeights", "not a rational: " + item);
    }
  }
  if (out.empty()) throw InputError("InvalidWeights", "no weights given");
  return out;
}

}  // namespace ipbt
