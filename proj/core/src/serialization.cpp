#include "cstar/serialization.hpp"

#include <sstream>

#include "json.hpp"

namespace cstar {

namespace {

using nlohmann::json;

json matrix_json(const ComplexMatrix& m) {
  json j;
  if (m.rows() == m.cols()) {
    j["dim"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

ComplexMatrix matrix_from(const json& j) {
  Eigen::Index rows, cols;
  if (j.contains("dim")) {
    rows = cols = j.at("dim").get<Eigen::Index>();
  } else {
    rows = j.at("rows").get<Eigen::Index>();
    cols = j.at("cols").get<Eigen::Index>();
  }
  if (rows < 0 || cols < 0) throw std::invalid_argument("matrix json: bad shape");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols)
    throw std::invalid_argument("matrix json: entry count mismatch");
  ComplexMatrix m(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c, ++idx)
      m(r, c) = Complex(re.at(idx).get<double>(), im.at(idx).get<double>());
  return m;
}

json vector_json(const ComplexVector& v) {
  json j;
  j["dim"] = v.size();
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

json embedding_json(const SubalgebraEmbedding& emb) {
  json j;
  j["ambient_dim"] = emb.ambient_dim;
  j["blocks"] = emb.structure.blocks;
  json images = json::object();
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        std::ostringstream key;
        key << i << "." << s << "." << t;
        images[key.str()] = matrix_json(emb.unit(i, s, t));
      }
  }
  j["unit_images"] = std::move(images);
  return j;
}

SubalgebraEmbedding embedding_from(const json& j) {
  SubalgebraEmbedding emb;
  emb.ambient_dim = j.at("ambient_dim").get<int>();
  emb.structure.blocks = j.at("blocks").get<std::vector<int>>();
  emb.structure.validate();
  const auto& images = j.at("unit_images");
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    std::vector<ComplexMatrix> block(static_cast<std::size_t>(n) * n);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        std::ostringstream key;
        key << i << "." << s << "." << t;
        if (!images.contains(key.str()))
          throw std::invalid_argument("embedding json: missing unit image " +
                                      key.str());
        block[static_cast<std::size_t>(s) * n + t] = matrix_from(images.at(key.str()));
      }
    emb.unit_images.push_back(std::move(block));
  }
  return emb;
}

const char* kind_name(CertificateKind k) {
  return k == CertificateKind::unitary ? "unitary" : "general";
}

CertificateKind kind_from(const std::string& s) {
  if (s == "unitary") return CertificateKind::unitary;
  if (s == "general") return CertificateKind::general;
  throw std::invalid_argument("certificate json: unknown kind " + s);
}

json certificate_json(const FullnessCertificate& cert) {
  json j;
  j["margin"] = cert.margin;
  j["kind"] = kind_name(cert.kind);
  json elements = json::array();
  for (const auto& x : cert.elements) elements.push_back(matrix_json(x));
  j["elements"] = std::move(elements);
  return j;
}

FullnessCertificate certificate_from(const json& j) {
  FullnessCertificate cert;
  cert.margin = j.at("margin").get<double>();
  cert.kind = kind_from(j.at("kind").get<std::string>());
  for (const auto& e : j.at("elements")) cert.elements.push_back(matrix_from(e));
  return cert;
}

const char* nonorth_status_name(NonOrthStatus s) {
  switch (s) {
    case NonOrthStatus::certified:
      return "certified";
    case NonOrthStatus::refuted:
      return "refuted";
    default:
      return "unknown";
  }
}

json nonorth_json(const NonOrthReport& report) {
  json j;
  j["status"] = nonorth_status_name(report.status);
  j["margin"] = report.margin;
  j["evaluations"] = report.evaluations;
  j["witness_x"] = report.witness_x ? vector_json(*report.witness_x) : json();
  j["witness_y"] = report.witness_y ? vector_json(*report.witness_y) : json();
  return j;
}

const char* search_status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::witness_found:
      return "witness_found";
    case SearchStatus::infeasible_by_bound:
      return "infeasible_by_bound";
    default:
      return "no_witness_found";
  }
}

SearchStatus search_status_from(const std::string& s) {
  if (s == "witness_found") return SearchStatus::witness_found;
  if (s == "no_witness_found") return SearchStatus::no_witness_found;
  if (s == "infeasible_by_bound") return SearchStatus::infeasible_by_bound;
  throw std::invalid_argument("search json: unknown status " + s);
}

json search_json(const SearchResult& r) {
  json j;
  j["d"] = r.d;
  j["k"] = r.k;
  j["best_margin"] = r.best_margin;
  j["best_unitary"] = r.best_unitary.size() > 0 ? matrix_json(r.best_unitary) : json();
  j["starts"] = r.starts;
  j["status"] = search_status_name(r.status);
  j["evaluations"] = r.evaluations;
  return j;
}

std::string dump(const json& j) { return j.dump(2); }

// Malformed documents surface as std::invalid_argument regardless of whether
// the failure is a parse error, a missing key, or a type mismatch.
template <typename F>
auto parse_as(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string to_json(const ComplexMatrix& m) { return dump(matrix_json(m)); }

ComplexMatrix matrix_from_json(const std::string& text) {
  return parse_as("matrix json", [&] { return matrix_from(json::parse(text)); });
}

std::string to_json(const SubalgebraEmbedding& emb) { return dump(embedding_json(emb)); }

SubalgebraEmbedding embedding_from_json(const std::string& text) {
  return parse_as("embedding json", [&] { return embedding_from(json::parse(text)); });
}

std::string to_json(const FullnessCertificate& cert) {
  return dump(certificate_json(cert));
}

FullnessCertificate certificate_from_json(const std::string& text) {
  return parse_as("certificate json",
                  [&] { return certificate_from(json::parse(text)); });
}

std::string to_json(const EmbeddingReport& report) {
  json j;
  j["relation_residual"] = report.relation_residual;
  j["adjoint_residual"] = report.adjoint_residual;
  j["unit_residual"] = report.unit_residual;
  j["independence_gap"] = report.independence_gap;
  j["multiplicities"] = report.multiplicities;
  j["dims_consistent"] = report.dims_consistent;
  return dump(j);
}

std::string to_json(const RelativeFullness& decision) {
  json j;
  j["full"] = decision.full;
  j["expectation"] = matrix_json(decision.expectation);
  j["expectation_min_eig"] = decision.expectation_min_eig;
  j["witness"] = decision.witness ? matrix_json(*decision.witness) : json();
  return dump(j);
}

std::string to_json(const VerifyReport& report) {
  json j;
  j["ok"] = report.ok;
  j["achieved_min_eig"] = report.achieved_min_eig;
  j["worst_membership"] = report.worst_membership;
  j["detail"] = report.detail;
  return dump(j);
}

std::string to_json(const NonOrthReport& report) { return dump(nonorth_json(report)); }

std::string to_json(const Intertwiner& iw) {
  json j;
  j["d"] = iw.d;
  j["k"] = iw.k;
  j["u"] = matrix_json(iw.u);
  j["f"] = matrix_json(iw.f);
  json rho = json::array();
  for (const auto& r : iw.rho) rho.push_back(matrix_json(r));
  j["rho"] = std::move(rho);
  return dump(j);
}

std::string to_json(const Tower& t) {
  json j;
  j["params"] = {{"ks", t.params.ks},
                 {"ls", t.params.ls},
                 {"regrouped_ks", t.params.regrouped_ks},
                 {"regrouped_ls", t.params.regrouped_ls},
                 {"ds", t.params.ds}};
  json levels = json::array();
  for (const auto& lv : t.levels) {
    json l;
    l["index"] = lv.index;
    l["ambient_dim"] = lv.ambient_dim;
    l["kappa"] = lv.kappa;
    l["inner_d"] = lv.inner_d;
    l["alignment"] = matrix_json(lv.alignment);
    l["level_unitary"] = lv.level_unitary ? matrix_json(*lv.level_unitary) : json();
    l["lambda_factor"] = lv.lambda.factor;
    l["mu_factor"] = lv.mu.factor;
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["log"] = t.log;
  return dump(j);
}

Tower tower_from_json(const std::string& text, const ToleranceConfig& tol) {
  tol.validate();
  return parse_as("tower json", [&] {
    json j = json::parse(text);
    Tower t;
    const auto& p = j.at("params");
    t.params.ks = p.at("ks").get<std::vector<int>>();
    t.params.ls = p.at("ls").get<std::vector<int>>();
    t.params.regrouped_ks = p.at("regrouped_ks").get<std::vector<int>>();
    t.params.regrouped_ls = p.at("regrouped_ls").get<std::vector<int>>();
    t.params.ds = p.at("ds").get<std::vector<int>>();
    if (j.contains("log")) t.log = j.at("log").get<std::vector<std::string>>();
    for (const auto& l : j.at("levels")) {
      TowerLevel lv;
      lv.index = l.at("index").get<int>();
      lv.ambient_dim = l.at("ambient_dim").get<int>();
      lv.kappa = l.at("kappa").get<int>();
      lv.inner_d = l.at("inner_d").get<int>();
      lv.alignment = matrix_from(l.at("alignment"));
      if (!l.at("level_unitary").is_null())
        lv.level_unitary = matrix_from(l.at("level_unitary"));
      lv.lambda.factor = l.at("lambda_factor").get<int>();
      lv.mu.factor = l.at("mu_factor").get<int>();
      if (lv.alignment.rows() != lv.ambient_dim || lv.kappa < 1 ||
          lv.ambient_dim != lv.kappa * lv.inner_d)
        throw std::invalid_argument("tower json: inconsistent level shape");
      if (!is_unitary(lv.alignment, 1e-8))
        throw std::invalid_argument("tower json: alignment is not unitary");
      // Unit images are rebuilt from the alignment rather than persisted.
      lv.B_emb.ambient_dim = lv.ambient_dim;
      lv.B_emb.structure.blocks = {lv.kappa};
      std::vector<ComplexMatrix> images(static_cast<std::size_t>(lv.kappa) * lv.kappa);
      for (int s = 0; s < lv.kappa; ++s) {
        auto us = lv.alignment.middleCols(
            static_cast<Eigen::Index>(s) * lv.inner_d, lv.inner_d);
        for (int u = 0; u < lv.kappa; ++u) {
          auto ut = lv.alignment.middleCols(
              static_cast<Eigen::Index>(u) * lv.inner_d, lv.inner_d);
          images[static_cast<std::size_t>(s) * lv.kappa + u].noalias() =
              us * ut.adjoint();
        }
      }
      lv.B_emb.unit_images.push_back(std::move(images));
      t.levels.push_back(std::move(lv));
    }
    return t;
  });
}

std::string to_json(const SquareReport& report) {
  json j;
  j["square_residuals"] = report.square_residuals;
  j["expectation_residuals"] = report.expectation_residuals;
  j["max_residual"] = report.max_residual;
  j["pass"] = report.pass;
  return dump(j);
}

std::string to_json(const RegularityReport& report) {
  json j;
  j["regular"] = report.regular;
  j["intersection_dim"] = report.intersection_dim;
  j["expected_dim"] = report.expected_dim;
  j["containment_residual"] = report.containment_residual;
  j["gram_gap"] = report.gram_gap;
  return dump(j);
}

std::string to_json(const CorollaryReport& report) {
  json j;
  json levels = json::array();
  for (const auto& entry : report.levels) {
    json l;
    l["level"] = entry.level;
    l["report"] = nonorth_json(entry.report);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["all_certified"] = report.all_certified;
  return dump(j);
}

std::string to_json(const PropagationResult& result) {
  json j;
  j["found"] = result.found;
  j["level"] = result.level;
  j["certificate"] = result.found ? certificate_json(result.certificate) : json();
  json spectra = json::array();
  for (const auto& s : result.level_spectra) {
    json row = json::array();
    for (Eigen::Index i = 0; i < s.size(); ++i) row.push_back(s(i));
    spectra.push_back(std::move(row));
  }
  j["level_spectra"] = std::move(spectra);
  return dump(j);
}

std::string to_json(const ChristensenBudget& budget) {
  json j;
  j["delta"] = budget.delta;
  j["q"] = budget.q;
  json table = json::array();
  for (const auto& row : budget.table)
    table.push_back({{"j", row.j}, {"gamma", row.gamma}, {"eta", row.eta}});
  j["table"] = std::move(table);
  return dump(j);
}

std::string to_json(const SearchResult& result) { return dump(search_json(result)); }

SearchResult search_result_from_json(const std::string& text) {
  return parse_as("search json", [&] {
    json j = json::parse(text);
    SearchResult r;
    r.d = j.at("d").get<int>();
    r.k = j.at("k").get<int>();
    r.best_margin = j.at("best_margin").get<double>();
    if (!j.at("best_unitary").is_null()) r.best_unitary = matrix_from(j.at("best_unitary"));
    r.starts = j.at("starts").get<int>();
    r.status = search_status_from(j.at("status").get<std::string>());
    r.evaluations = j.at("evaluations").get<long>();
    return r;
  });
}

std::string to_json(const IntervalResult& result) {
  json j;
  j["d"] = result.d;
  j["k_lo"] = result.k_lo;
  j["k_hi"] = result.k_hi;
  json rows = json::array();
  for (const auto& row : result.evidence)
    rows.push_back({{"k", row.k},
                    {"status", search_status_name(row.status)},
                    {"margin", row.margin},
                    {"starts", row.starts},
                    {"seed", row.seed}});
  j["evidence"] = std::move(rows);
  return dump(j);
}

std::string to_json(const SpanningResult& result) {
  json j;
  j["d"] = result.d;
  j["m_lo"] = result.m_lo;
  j["m_hi"] = result.m_hi;
  json family = json::array();
  for (const auto& a : result.best_family) family.push_back(matrix_json(a));
  j["best_family"] = std::move(family);
  j["best_margin"] = result.best_margin;
  json rows = json::array();
  for (const auto& [m, margin] : result.evidence)
    rows.push_back({{"m", m}, {"margin", margin}});
  j["evidence"] = std::move(rows);
  return dump(j);
}

std::string interval_evidence_csv(const IntervalResult& result) {
  std::ostringstream out;
  out << "d,k,status,margin,starts,seed\n";
  out.precision(12);
  for (const auto& row : result.evidence)
    out << result.d << "," << row.k << "," << search_status_name(row.status) << ","
        << row.margin << "," << row.starts << "," << row.seed << "\n";
  return out.str();
}

}  // namespace cstar
