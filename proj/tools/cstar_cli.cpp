// Command-line front end: algebra, full, nonorth, tower, ksearch subcommands
// with JSON reports. Every report embeds a run manifest (command line, seed,
// tolerances, input digests, tool version, wall time).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <cstar/algebra.hpp>
#include <cstar/fullness.hpp>
#include <cstar/ksearch.hpp>
#include <cstar/orthogonality.hpp>
#include <cstar/serialization.hpp>
#include <cstar/tower.hpp>
#include <cstar/version.hpp>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitNegative = 3;
constexpr int kExitBudget = 4;

struct RunContext {
  double tol_eig = 1e-9;
  double tol_id = 1e-10;
  std::uint64_t seed = 1;
  const CLI::Option* seed_option = nullptr;
  std::string out = "-";
  std::string format = "json";
  std::string command_line;
  std::vector<std::pair<std::string, std::string>> digests;
  std::chrono::steady_clock::time_point start;
};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_input(RunContext& ctx, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a(text)));
  ctx.digests.emplace_back(path, digest);
  return text;
}

// CLI-written documents wrap the payload as {"manifest":..., "report":...};
// consuming subcommands accept either the wrapped document or the bare payload.
std::string unwrap(const std::string& text) {
  json j = json::parse(text);
  if (j.is_object() && j.contains("report")) return j.at("report").dump();
  return text;
}

// A unitary argument may be a bare matrix or any report carrying a "u" field,
// such as an intertwiner document.
std::string unwrap_unitary(const std::string& text) {
  json j = json::parse(unwrap(text));
  if (j.is_object() && j.contains("u") && !j.contains("re"))
    return j.at("u").dump();
  return j.dump();
}

cstar::ToleranceConfig tolerances(const RunContext& ctx) {
  cstar::ToleranceConfig tol;
  tol.eig_floor = ctx.tol_eig;
  tol.identity_tol = ctx.tol_id;
  tol.validate();
  return tol;
}

void require_seed_in_ci(const RunContext& ctx) {
  const bool seed_given = ctx.seed_option && ctx.seed_option->count() > 0;
  if (std::getenv("CSTAR_CI") != nullptr && !seed_given)
    throw std::invalid_argument(
        "randomized subcommands require an explicit --seed when CSTAR_CI is set");
}

int emit(const RunContext& ctx, json report, int code) {
  const cstar::ToleranceConfig tol = tolerances(ctx);
  json manifest;
  manifest["command_line"] = ctx.command_line;
  manifest["seed"] = ctx.seed;
  manifest["tolerances"] = {{"eig_floor", tol.eig_floor},
                            {"identity_tol", tol.identity_tol},
                            {"cert_margin", tol.cert_margin}};
  json digests = json::object();
  for (const auto& [path, digest] : ctx.digests) digests[path] = digest;
  manifest["input_digests"] = std::move(digests);
  manifest["tool_version"] = cstar::kVersion;
  manifest["wall_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                ctx.start)
          .count();
  json doc;
  doc["manifest"] = std::move(manifest);
  doc["report"] = std::move(report);
  const std::string text = doc.dump(2);
  if (ctx.out == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream file(ctx.out);
    if (!file) throw std::invalid_argument("cannot open output file: " + ctx.out);
    file << text << "\n";
    std::cout << ctx.out << "\n";
  }
  return code;
}

json as_json(const std::string& serialized) { return json::parse(serialized); }

int run_cli(int argc, char** argv) {
  RunContext ctx;
  ctx.start = std::chrono::steady_clock::now();
  {
    std::ostringstream line;
    for (int i = 0; i < argc; ++i) {
      if (i) line << " ";
      line << argv[i];
    }
    ctx.command_line = line.str();
  }

  CLI::App app{"Finite-dimensional inclusion toolkit: commutants, conditional "
               "expectations, fullness certificates, intertwiners, inclusion "
               "towers, and unitary searches."};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol-eig", ctx.tol_eig, "Spectral floor for decisions")
      ->capture_default_str();
  app.add_option("--tol-id", ctx.tol_id, "Tolerance for exact identities")
      ->capture_default_str();
  ctx.seed_option = app.add_option("--seed", ctx.seed, "Seed for randomized paths")
                        ->capture_default_str();
  app.add_option("--out", ctx.out, "Output path, or - for stdout")
      ->capture_default_str();
  app.add_option("--format", ctx.format, "Report format")
      ->check(CLI::IsMember({"json"}))
      ->capture_default_str();

  int exit_code = kExitOk;
  auto set = [&exit_code](int code) { exit_code = code; };

  // algebra -------------------------------------------------------------
  auto* algebra = app.add_subcommand("algebra", "Embeddings and expectations");
  algebra->require_subcommand(1);

  {
    auto* cmd = algebra->add_subcommand("validate", "Check matrix-unit relations");
    auto emb_path = std::make_shared<std::string>();
    cmd->add_option("--emb", *emb_path, "Embedding JSON file")->required();
    cmd->callback([&, emb_path] {
      auto emb = cstar::embedding_from_json(read_input(ctx, *emb_path));
      auto tol = tolerances(ctx);
      auto report = cstar::validate_embedding(emb, tol);
      json body = as_json(cstar::to_json(report));
      body["valid"] = report.valid(tol);
      set(emit(ctx, body, report.valid(tol) ? kExitOk : kExitNegative));
    });
  }
  {
    auto* cmd = algebra->add_subcommand("commutant", "Orthonormal commutant basis");
    auto emb_path = std::make_shared<std::string>();
    cmd->add_option("--emb", *emb_path, "Embedding JSON file")->required();
    cmd->callback([&, emb_path] {
      auto emb = cstar::embedding_from_json(read_input(ctx, *emb_path));
      auto basis = cstar::commutant(emb, tolerances(ctx));
      json list = json::array();
      for (const auto& b : basis.basis) list.push_back(as_json(cstar::to_json(b)));
      json body;
      body["dimension"] = basis.basis.size();
      body["basis"] = std::move(list);
      set(emit(ctx, body, kExitOk));
    });
  }
  {
    auto* cmd = algebra->add_subcommand("expect", "Apply the conditional expectation");
    auto emb_path = std::make_shared<std::string>();
    auto elem_path = std::make_shared<std::string>();
    cmd->add_option("--emb", *emb_path, "Embedding JSON file")->required();
    cmd->add_option("--elem", *elem_path, "Element JSON file")->required();
    cmd->callback([&, emb_path, elem_path] {
      auto emb = cstar::embedding_from_json(read_input(ctx, *emb_path));
      auto a = cstar::matrix_from_json(unwrap(read_input(ctx, *elem_path)));
      auto e = cstar::conditional_expectation(emb, a, tolerances(ctx));
      json body;
      body["expectation"] = as_json(cstar::to_json(e));
      body["min_eigenvalue"] = cstar::min_eigenvalue(cstar::hermitian_part(e));
      set(emit(ctx, body, kExitOk));
    });
  }

  // full ----------------------------------------------------------------
  auto* full = app.add_subcommand("full", "Relative fullness decisions");
  full->require_subcommand(1);

  {
    auto* cmd = full->add_subcommand("decide", "Decide relative fullness");
    auto emb_path = std::make_shared<std::string>();
    auto elem_path = std::make_shared<std::string>();
    cmd->add_option("--emb", *emb_path, "Embedding JSON file")->required();
    cmd->add_option("--elem", *elem_path, "Positive element JSON file")->required();
    cmd->callback([&, emb_path, elem_path] {
      auto emb = cstar::embedding_from_json(read_input(ctx, *emb_path));
      auto a = cstar::matrix_from_json(unwrap(read_input(ctx, *elem_path)));
      auto decision = cstar::relatively_full(a, emb, tolerances(ctx));
      set(emit(ctx, as_json(cstar::to_json(decision)),
               decision.full ? kExitOk : kExitNegative));
    });
  }
  {
    auto* cmd = full->add_subcommand("certify", "Construct a fullness certificate");
    auto emb_path = std::make_shared<std::string>();
    auto elem_path = std::make_shared<std::string>();
    auto margin = std::make_shared<double>(0.5);
    auto budget = std::make_shared<int>(512);
    cmd->add_option("--emb", *emb_path, "Embedding JSON file")->required();
    cmd->add_option("--elem", *elem_path, "Positive element JSON file")->required();
    cmd->add_option("--target-margin", *margin, "Relative stopping margin")
        ->capture_default_str();
    cmd->add_option("--budget", *budget, "Maximum family size")->capture_default_str();
    cmd->callback([&, emb_path, elem_path, margin, budget] {
      require_seed_in_ci(ctx);
      auto emb = cstar::embedding_from_json(read_input(ctx, *emb_path));
      auto a = cstar::matrix_from_json(unwrap(read_input(ctx, *elem_path)));
      auto cert = cstar::certificate_from_expectation(a, emb, *margin, ctx.seed,
                                                      *budget, tolerances(ctx));
      set(emit(ctx, as_json(cstar::to_json(cert)), kExitOk));
    });
  }
  {
    auto* cmd = full->add_subcommand("verify", "Verify a fullness certificate");
    auto elem_path = std::make_shared<std::string>();
    auto cert_path = std::make_shared<std::string>();
    auto emb_path = std::make_shared<std::string>();
    cmd->add_option("--elem", *elem_path, "Positive element JSON file")->required();
    cmd->add_option("--cert", *cert_path, "Certificate JSON file")->required();
    cmd->add_option("--emb", *emb_path, "Optional embedding for membership checks");
    cmd->callback([&, elem_path, cert_path, emb_path] {
      auto a = cstar::matrix_from_json(unwrap(read_input(ctx, *elem_path)));
      auto cert = cstar::certificate_from_json(unwrap(read_input(ctx, *cert_path)));
      cstar::SubalgebraEmbedding emb;
      const cstar::SubalgebraEmbedding* emb_ptr = nullptr;
      if (!emb_path->empty()) {
        emb = cstar::embedding_from_json(read_input(ctx, *emb_path));
        emb_ptr = &emb;
      }
      auto report = cstar::verify_certificate(a, cert, emb_ptr, tolerances(ctx));
      set(emit(ctx, as_json(cstar::to_json(report)),
               report.ok ? kExitOk : kExitNegative));
    });
  }

  // nonorth ---------------------------------------------------------------
  auto* nonorth = app.add_subcommand("nonorth", "Non-orthogonal conjugates");
  nonorth->require_subcommand(1);

  {
    auto* cmd = nonorth->add_subcommand("intertwine", "Deterministic intertwiner");
    auto d = std::make_shared<int>(0);
    auto k = std::make_shared<int>(0);
    cmd->add_option("--d", *d, "Corner dimension")->required();
    cmd->add_option("--k", *k, "Factor dimension")->required();
    cmd->callback([&, d, k] {
      auto iw = cstar::intertwiner_construct(*d, *k, tolerances(ctx));
      set(emit(ctx, as_json(cstar::to_json(iw)), kExitOk));
    });
  }
  {
    auto* cmd = nonorth->add_subcommand("certify", "Certify or refute a conjugate");
    auto u_path = std::make_shared<std::string>();
    auto d = std::make_shared<int>(0);
    auto k = std::make_shared<int>(0);
    auto budget = std::make_shared<long>(20000);
    auto confidence = std::make_shared<double>(1e-4);
    cmd->add_option("--u", *u_path, "Unitary JSON file")->required();
    cmd->add_option("--d", *d, "Corner dimension")->required();
    cmd->add_option("--k", *k, "Factor dimension")->required();
    cmd->add_option("--budget", *budget, "Objective evaluation budget")
        ->capture_default_str();
    cmd->add_option("--confidence", *confidence, "Certification threshold")
        ->capture_default_str();
    cmd->callback([&, u_path, d, k, budget, confidence] {
      require_seed_in_ci(ctx);
      auto u = cstar::matrix_from_json(unwrap_unitary(read_input(ctx, *u_path)));
      auto report = cstar::certify_nonorthogonal_conjugate(
          u, *d, *k, *budget, ctx.seed, tolerances(ctx), *confidence);
      int code = kExitBudget;
      if (report.status == cstar::NonOrthStatus::certified) code = kExitOk;
      if (report.status == cstar::NonOrthStatus::refuted) code = kExitNegative;
      set(emit(ctx, as_json(cstar::to_json(report)), code));
    });
  }

  // tower -----------------------------------------------------------------
  auto* tower = app.add_subcommand("tower", "Inclusion towers");
  tower->require_subcommand(1);

  {
    auto* cmd = tower->add_subcommand("build", "Build a tower of inclusions");
    auto ks = std::make_shared<std::vector<int>>();
    auto ls = std::make_shared<std::vector<int>>();
    auto depth = std::make_shared<int>(1);
    cmd->add_option("--ks", *ks, "Inner dimensions, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--ls", *ls, "Step dimensions, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--depth", *depth, "Number of levels")->required();
    cmd->callback([&, ks, ls, depth] {
      require_seed_in_ci(ctx);
      auto t = cstar::build_uhf_tower(*ks, *ls, *depth, ctx.seed, tolerances(ctx));
      set(emit(ctx, as_json(cstar::to_json(t)), kExitOk));
    });
  }
  {
    auto* cmd = tower->add_subcommand("verify", "Verify tower properties");
    auto tower_path = std::make_shared<std::string>();
    auto budget = std::make_shared<long>(20000);
    auto check_exp = std::make_shared<bool>(false);
    cmd->add_option("--tower", *tower_path, "Tower JSON file")->required();
    cmd->add_option("--budget", *budget, "Certification budget")
        ->capture_default_str();
    cmd->add_flag("--check-expectations", *check_exp,
                  "Also require compatible expectations");
    cmd->callback([&, tower_path, budget, check_exp] {
      require_seed_in_ci(ctx);
      auto tol = tolerances(ctx);
      auto t = cstar::tower_from_json(unwrap(read_input(ctx, *tower_path)), tol);
      auto squares = cstar::verify_commuting_squares(t, *check_exp, tol);
      json regularity = json::array();
      bool all_regular = true;
      for (int n = 1; n < t.depth(); ++n) {
        auto r = cstar::regularity_check(t, n, n + 1, tol);
        json row = as_json(cstar::to_json(r));
        row["n"] = n;
        row["m"] = n + 1;
        all_regular = all_regular && r.regular;
        regularity.push_back(std::move(row));
      }
      auto corollary = cstar::verify_corollary_conditions(t, *budget, ctx.seed, tol);
      const bool pass = squares.pass && all_regular && corollary.all_certified;
      json body;
      body["squares"] = as_json(cstar::to_json(squares));
      body["regularity"] = std::move(regularity);
      body["corollary"] = as_json(cstar::to_json(corollary));
      body["pass"] = pass;
      set(emit(ctx, body, pass ? kExitOk : kExitNegative));
    });
  }
  {
    auto* cmd = tower->add_subcommand("propagate", "Propagate fullness upward");
    auto tower_path = std::make_shared<std::string>();
    auto elem_path = std::make_shared<std::string>();
    auto level = std::make_shared<int>(1);
    auto budget = std::make_shared<int>(512);
    cmd->add_option("--tower", *tower_path, "Tower JSON file")->required();
    cmd->add_option("--elem", *elem_path, "Positive element JSON file")->required();
    cmd->add_option("--level", *level, "Starting level")->capture_default_str();
    cmd->add_option("--budget", *budget, "Certificate budget")->capture_default_str();
    cmd->callback([&, tower_path, elem_path, level, budget] {
      require_seed_in_ci(ctx);
      auto tol = tolerances(ctx);
      auto t = cstar::tower_from_json(unwrap(read_input(ctx, *tower_path)), tol);
      auto a = cstar::matrix_from_json(unwrap(read_input(ctx, *elem_path)));
      auto result = cstar::propagate_fullness(t, *level, a, ctx.seed, *budget, tol);
      set(emit(ctx, as_json(cstar::to_json(result)),
               result.found ? kExitOk : kExitNegative));
    });
  }
  {
    auto* cmd = tower->add_subcommand("budget", "Perturbation budget recursion");
    auto n = std::make_shared<int>(1);
    auto eps = std::make_shared<double>(0.1);
    cmd->add_option("--n", *n, "Number of levels")->required();
    cmd->add_option("--eps", *eps, "Top-level tolerance")->required();
    cmd->callback([&, n, eps] {
      auto budget = cstar::christensen_budget(*n, *eps);
      set(emit(ctx, as_json(cstar::to_json(budget)), kExitOk));
    });
  }

  // ksearch -----------------------------------------------------------------
  auto* ksearch = app.add_subcommand("ksearch", "Unitary witness searches");
  ksearch->require_subcommand(1);

  auto add_search_options = [](CLI::App* cmd, std::shared_ptr<cstar::SearchOptions> o) {
    cmd->add_option("--starts", o->starts, "Multistart count")->capture_default_str();
    cmd->add_option("--iters", o->iters, "Ascent iterations per start")
        ->capture_default_str();
    cmd->add_option("--budget", o->budget, "Objective evaluation budget")
        ->capture_default_str();
  };

  {
    auto* cmd = ksearch->add_subcommand("run", "Search one (d, k) cell");
    auto d = std::make_shared<int>(0);
    auto k = std::make_shared<int>(0);
    auto opts = std::make_shared<cstar::SearchOptions>();
    cmd->add_option("--d", *d, "Corner dimension")->required();
    cmd->add_option("--k", *k, "Factor dimension")->required();
    add_search_options(cmd, opts);
    cmd->callback([&, d, k, opts] {
      require_seed_in_ci(ctx);
      opts->seed = ctx.seed;
      auto result = cstar::search_unitary(*d, *k, *opts, tolerances(ctx));
      int code = kExitBudget;
      if (result.status == cstar::SearchStatus::witness_found) code = kExitOk;
      if (result.status == cstar::SearchStatus::infeasible_by_bound)
        code = kExitNegative;
      set(emit(ctx, as_json(cstar::to_json(result)), code));
    });
  }
  {
    auto* cmd = ksearch->add_subcommand("interval", "Narrow the feasible interval");
    auto d = std::make_shared<int>(0);
    auto csv = std::make_shared<std::string>();
    auto opts = std::make_shared<cstar::SearchOptions>();
    cmd->add_option("--d", *d, "Corner dimension")->required();
    cmd->add_option("--csv", *csv, "Also write the evidence table as CSV");
    add_search_options(cmd, opts);
    cmd->callback([&, d, csv, opts] {
      require_seed_in_ci(ctx);
      opts->seed = ctx.seed;
      auto result = cstar::narrow_interval(*d, *opts, tolerances(ctx));
      if (!csv->empty()) {
        std::ofstream file(*csv);
        if (!file) throw std::invalid_argument("cannot open output file: " + *csv);
        file << cstar::interval_evidence_csv(result);
      }
      set(emit(ctx, as_json(cstar::to_json(result)), kExitOk));
    });
  }
  {
    auto* cmd = ksearch->add_subcommand("spanning", "Minimal spanning family size");
    auto d = std::make_shared<int>(0);
    auto opts = std::make_shared<cstar::SearchOptions>();
    cmd->add_option("--d", *d, "Matrix dimension")->required();
    add_search_options(cmd, opts);
    cmd->callback([&, d, opts] {
      require_seed_in_ci(ctx);
      opts->seed = ctx.seed;
      auto result = cstar::spanning_family_min(*d, *opts, tolerances(ctx));
      set(emit(ctx, as_json(cstar::to_json(result)), kExitOk));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return kExitInput;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const cstar::BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
