// Copyright 2026 The pacguard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pacguard/bounds/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "pacguard/io/format.hpp"
#include "pacguard/bounds/pac_bayes.hpp"

namespace pacguard {

using nlohmann::json;
using detail::format_double;

void ConfidenceBudget::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("budget.delta must be in (0,1)");
  if (!(delta_mc > 0.0 && delta_mc < 1.0)) {
    throw std::invalid_argument("budget.delta_mc must be in (0,1)");
  }
  if (m < 1) throw std::invalid_argument("budget.M must be >= 1");
}

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kMisclassification: return "misclassification";
    case CertificateKind::kConditional: return "conditional";
    case CertificateKind::kFnr: return "fnr";
    case CertificateKind::kFpr: return "fpr";
  }
  return "?";
}

CertificateKind certificate_kind_from_string(std::string_view s) {
  if (s == "misclassification") return CertificateKind::kMisclassification;
  if (s == "conditional") return CertificateKind::kConditional;
  if (s == "fnr") return CertificateKind::kFnr;
  if (s == "fpr") return CertificateKind::kFpr;
  throw std::invalid_argument("unknown certificate kind '" + std::string(s) + "'");
}

double c_lambda(double lambda, double p_low_0, double p_low_1) {
  if (!(p_low_0 > 0.0) || !(p_low_1 > 0.0)) {
    throw CertificationImpossible("class lower bound is not positive");
  }
  return lambda / p_low_0 + (1.0 - lambda) / p_low_1;
}

double conditional_cost(OutcomeKind outcome, double lambda, double p_low_0, double p_low_1) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0,1]");
  const double cl = c_lambda(lambda, p_low_0, p_low_1);
  switch (outcome) {
    case OutcomeKind::kFalsePositive: return lambda / (cl * p_low_0);
    case OutcomeKind::kFalseNegative: return (1.0 - lambda) / (cl * p_low_1);
    default: return 0.0;
  }
}

double chain_ratio_bound(const BernsteinResult& r) {
  if (!(r.p_low > 0.0) || r.p_low >= 1.0) return std::numeric_limits<double>::infinity();
  return 0.3 * std::sqrt(static_cast<double>(r.n) * r.p_low /
                         ((1.0 - r.p_low) * std::log(2.0 / r.delta)));
}

namespace {

double mc_inflate(double mean, const Certificate& c) {
  if (!c.sample_convergence) return mean;
  return kl_inverse_bound(mean, c.m, c.delta_mc);
}

// Shared by certification and audit so both follow one arithmetic path.
void assemble_misclassification(Certificate& c) {
  c.empirical_term = static_cast<double>(c.errors) / static_cast<double>(c.n * c.m);
  c.mc_term = mc_inflate(c.empirical_term, c) - c.empirical_term;
  c.regularizer = mcallester_gap(c.kl, c.n, c.delta_pac);
  c.pac_term = c.regularizer;
  c.bound_preclip = c.empirical_term + c.mc_term + c.pac_term;
}

void assemble_conditional(Certificate& c) {
  const double nm = static_cast<double>(c.n * c.m);
  const std::uint64_t n1 = c.n_class1;
  const std::uint64_t n0 = c.n - n1;
  c.class1 = bernstein_lower(static_cast<double>(n1) / static_cast<double>(c.n), c.n,
                             c.delta_bernstein);
  c.class0 = bernstein_lower(static_cast<double>(n0) / static_cast<double>(c.n), c.n,
                             c.delta_bernstein);
  const double p0 = c.class0.p_low;
  const double p1 = c.class1.p_low;
  c.c_lambda = c_lambda(c.lambda, p0, p1);
  const double w_fp = c.lambda / (c.c_lambda * p0);
  const double w_fn = (1.0 - c.lambda) / (c.c_lambda * p1);
  c.c_tilde_mean = (w_fp * static_cast<double>(c.fp) + w_fn * static_cast<double>(c.fn)) / nm;
  const double fnr = static_cast<double>(c.fn) / (static_cast<double>(n1 * c.m));
  const double fpr = static_cast<double>(c.fp) / (static_cast<double>(n0 * c.m));
  c.empirical_term = (1.0 - c.lambda) * fnr + c.lambda * fpr;
  c.mc_term = c.c_lambda * (mc_inflate(c.c_tilde_mean, c) - c.c_tilde_mean);
  c.regularizer = mcallester_gap(c.kl, c.n, c.delta_pac);
  c.pac_term = c.c_lambda * c.regularizer;
  const double p_min = std::min(p0, p1);
  c.bernstein_term = (5.0 / 3.0) * std::sqrt((1.0 - p_min) * std::log(2.0 / c.delta_bernstein) /
                                             (static_cast<double>(c.n) * p_min));
  c.chain_bound = c.c_lambda * c.c_tilde_mean + c.mc_term + c.pac_term;
  const double stated = c.empirical_term + c.bernstein_term + c.mc_term + c.pac_term;
  // The closed-form Bernstein term presumes an empirical cost of at most 1/2;
  // the chain form is valid regardless, so the larger of the two is reported.
  c.bound_preclip = std::max(stated, c.chain_bound);
}

void finish(Certificate& c) {
  c.bound = std::min(c.bound_preclip, 1.0);
  if (c.bound_preclip > 1.0) c.warnings.push_back("vacuous: pre-clip bound exceeds 1");
}

}  // namespace

Certificate certify_misclassification(const OutcomeCounts& counts, double kl,
                                      const ConfidenceBudget& budget, std::string prior_id) {
  budget.validate();
  counts.validate();
  if (counts.environments < 1) throw std::invalid_argument("certify: need N >= 1");
  if (counts.draws != budget.m && budget.sample_convergence) {
    throw std::invalid_argument("certify: counts were evaluated with " +
                                std::to_string(counts.draws) + " draws but budget.M = " +
                                std::to_string(budget.m));
  }
  Certificate c;
  c.kind = CertificateKind::kMisclassification;
  c.kl = kl;
  c.n = counts.environments;
  c.m = counts.draws;
  c.n_class1 = counts.positives();
  c.fp = counts.fp;
  c.fn = counts.fn;
  c.errors = counts.errors();
  c.delta = budget.delta;
  c.delta_mc = budget.delta_mc;
  c.delta_pac = budget.delta;
  c.delta_bernstein = 0.0;
  c.strict_delta = budget.strict_delta;
  c.sample_convergence = budget.sample_convergence;
  c.prior_id = std::move(prior_id);
  assemble_misclassification(c);
  finish(c);
  return c;
}

Certificate certify_conditional(const OutcomeCounts& counts, double kl, double lambda,
                                const ConfidenceBudget& budget, std::string prior_id) {
  budget.validate();
  counts.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0,1]");
  if (counts.draws != budget.m && budget.sample_convergence) {
    throw std::invalid_argument("certify: counts were evaluated with " +
                                std::to_string(counts.draws) + " draws but budget.M = " +
                                std::to_string(budget.m));
  }
  const auto n1 = counts.positives();
  const auto n0 = counts.negatives();
  if (n1 == 0) throw CertificationImpossible("no failures (class 1) in the data");
  if (n0 == 0) throw CertificationImpossible("no successes (class 0) in the data");
  Certificate c;
  c.kind = lambda == 0.0   ? CertificateKind::kFnr
           : lambda == 1.0 ? CertificateKind::kFpr
                           : CertificateKind::kConditional;
  c.kl = kl;
  c.lambda = lambda;
  c.n = counts.environments;
  c.m = counts.draws;
  c.n_class1 = n1;
  c.fp = counts.fp;
  c.fn = counts.fn;
  c.errors = counts.errors();
  c.delta = budget.delta;
  c.delta_mc = budget.delta_mc;
  c.strict_delta = budget.strict_delta;
  c.delta_bernstein = budget.strict_delta ? budget.delta / 2.0 : budget.delta;
  c.delta_pac = budget.strict_delta ? budget.delta / 2.0 : budget.delta;
  c.sample_convergence = budget.sample_convergence;
  c.prior_id = std::move(prior_id);
  const auto b1 = bernstein_lower(static_cast<double>(n1) / static_cast<double>(c.n), c.n,
                                  c.delta_bernstein);
  const auto b0 = bernstein_lower(static_cast<double>(n0) / static_cast<double>(c.n), c.n,
                                  c.delta_bernstein);
  if (b1.insufficient()) {
    throw CertificationImpossible("class 1 lower bound insufficient (K = " +
                                  format_double(b1.k_low) + " <= 1)");
  }
  if (b0.insufficient()) {
    throw CertificationImpossible("class 0 lower bound insufficient (K = " +
                                  format_double(b0.k_low) + " <= 1)");
  }
  assemble_conditional(c);
  if (c.empirical_term > 0.5) {
    c.warnings.push_back("empirical conditional cost above 1/2; reporting the chain form");
  }
  finish(c);
  return c;
}

double recompute_bound(const Certificate& cert) {
  Certificate c;
  c.kind = cert.kind;
  c.kl = cert.kl;
  c.lambda = cert.lambda;
  c.n = cert.n;
  c.m = cert.m;
  c.n_class1 = cert.n_class1;
  c.fp = cert.fp;
  c.fn = cert.fn;
  c.errors = cert.errors;
  c.delta_mc = cert.delta_mc;
  c.delta_pac = cert.delta_pac;
  c.delta_bernstein = cert.delta_bernstein;
  c.sample_convergence = cert.sample_convergence;
  if (cert.kind == CertificateKind::kMisclassification) {
    assemble_misclassification(c);
  } else {
    assemble_conditional(c);
  }
  return c.bound_preclip;
}

std::vector<CurveRow> fnr_fpr_curve(const std::vector<SweepPoint>& points,
                                    const ConfidenceBudget& budget) {
  if (points.size() < 2) throw std::invalid_argument("fnr_fpr_curve: need >= 2 sweep points");
  std::vector<CurveRow> rows;
  for (const auto& p : points) {
    CurveRow row;
    row.train_weight = p.train_weight;
    try {
      row.fnr = certify_conditional(p.counts, p.kl, 0.0, budget);
    } catch (const CertificationImpossible& e) {
      row.fnr_refusal = e.what();
    }
    try {
      row.fpr = certify_conditional(p.counts, p.kl, 1.0, budget);
    } catch (const CertificationImpossible& e) {
      row.fpr_refusal = e.what();
    }
    const auto& emp = p.heldout ? *p.heldout : p.counts;
    row.empirical_fnr = emp.fnr();
    row.empirical_fpr = emp.fpr();
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

json bernstein_json(const BernsteinResult& r) {
  return {{"p_hat", r.p_hat}, {"p_low", r.p_low}, {"k_low", r.k_low},
          {"k_chain", chain_ratio_bound(r)}, {"k_coef", r.k_coef},
          {"n", r.n}, {"delta", r.delta}, {"insufficient", r.insufficient()}};
}

BernsteinResult bernstein_from_json(const json& j) {
  BernsteinResult r;
  r.p_hat = j.at("p_hat").get<double>();
  r.p_low = j.at("p_low").get<double>();
  r.k_low = j.at("k_low").get<double>();
  r.k_coef = j.at("k_coef").get<double>();
  r.n = j.at("n").get<std::uint64_t>();
  r.delta = j.at("delta").get<double>();
  return r;
}

}  // namespace

std::string certificate_to_json(const Certificate& c) {
  json j;
  j["format"] = "pacguard.certificate";
  j["version"] = 1;
  j["kind"] = std::string(to_string(c.kind));
  j["bound"] = c.bound;
  j["bound_preclip"] = c.bound_preclip;
  j["empirical_term"] = c.empirical_term;
  j["mc_term"] = c.mc_term;
  j["kl"] = c.kl;
  j["regularizer"] = c.regularizer;
  j["pac_term"] = c.pac_term;
  json inputs = {{"N", c.n}, {"M", c.m}, {"n_class1", c.n_class1}, {"fp", c.fp},
                 {"fn", c.fn}, {"errors", c.errors}, {"delta", c.delta},
                 {"delta_mc", c.delta_mc}, {"delta_pac", c.delta_pac},
                 {"delta_bernstein", c.delta_bernstein},
                 {"delta_mode", c.strict_delta ? "strict_split" : "shared"},
                 {"sample_convergence", c.sample_convergence}, {"lambda", c.lambda},
                 {"prior", c.prior_id}};
  j["inputs"] = inputs;
  if (c.kind != CertificateKind::kMisclassification) {
    j["r_lambda_parts"] = {{"bernstein_term", c.bernstein_term},
                           {"c_lambda_pac_term", c.pac_term},
                           {"c_lambda_mc_term", c.mc_term}};
    j["c_lambda"] = c.c_lambda;
    j["c_tilde_mean"] = c.c_tilde_mean;
    j["chain_bound"] = c.chain_bound;
    j["class0"] = bernstein_json(c.class0);
    j["class1"] = bernstein_json(c.class1);
  }
  j["warnings"] = c.warnings;
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(std::string_view text) {
  const json j = json::parse(text);
  if (j.at("format") != "pacguard.certificate") throw std::invalid_argument("not a certificate");
  Certificate c;
  c.kind = certificate_kind_from_string(j.at("kind").get<std::string>());
  c.bound = j.at("bound").get<double>();
  c.bound_preclip = j.at("bound_preclip").get<double>();
  c.empirical_term = j.at("empirical_term").get<double>();
  c.mc_term = j.at("mc_term").get<double>();
  c.kl = j.at("kl").get<double>();
  c.regularizer = j.at("regularizer").get<double>();
  c.pac_term = j.at("pac_term").get<double>();
  const auto& in = j.at("inputs");
  c.n = in.at("N").get<std::uint64_t>();
  c.m = in.at("M").get<std::uint64_t>();
  c.n_class1 = in.at("n_class1").get<std::uint64_t>();
  c.fp = in.at("fp").get<std::uint64_t>();
  c.fn = in.at("fn").get<std::uint64_t>();
  c.errors = in.at("errors").get<std::uint64_t>();
  c.delta = in.at("delta").get<double>();
  c.delta_mc = in.at("delta_mc").get<double>();
  c.delta_pac = in.at("delta_pac").get<double>();
  c.delta_bernstein = in.at("delta_bernstein").get<double>();
  c.strict_delta = in.at("delta_mode") == "strict_split";
  c.sample_convergence = in.at("sample_convergence").get<bool>();
  c.lambda = in.at("lambda").get<double>();
  c.prior_id = in.at("prior").get<std::string>();
  if (c.kind != CertificateKind::kMisclassification) {
    c.bernstein_term = j.at("r_lambda_parts").at("bernstein_term").get<double>();
    c.c_lambda = j.at("c_lambda").get<double>();
    c.c_tilde_mean = j.at("c_tilde_mean").get<double>();
    c.chain_bound = j.at("chain_bound").get<double>();
    c.class0 = bernstein_from_json(j.at("class0"));
    c.class1 = bernstein_from_json(j.at("class1"));
  }
  c.warnings = j.at("warnings").get<std::vector<std::string>>();
  return c;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "train_weight,fnr_bound,fpr_bound,empirical_fnr,empirical_fpr,fnr_certified,"
         "fpr_certified\n";
  for (const auto& r : rows) {
    out << format_double(r.train_weight) << ','
        << (r.fnr ? format_double(r.fnr->bound) : "nan") << ','
        << (r.fpr ? format_double(r.fpr->bound) : "nan") << ','
        << format_double(r.empirical_fnr) << ',' << format_double(r.empirical_fpr) << ','
        << (r.fnr ? 1 : 0) << ',' << (r.fpr ? 1 : 0) << '\n';
  }
}

}  // namespace pacguard
