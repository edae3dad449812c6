#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "stlen/certify.hpp"
#include "stlen/lp.hpp"
#include "stlen/selftest.hpp"

namespace {

using namespace stlen;

// exit codes: 0 exact / success, 2 bounds-only, 1 error
constexpr int kExact = 0;
constexpr int kBoundsOnly = 2;
constexpr int kError = 1;

FiniteGroup parse_group_spec(const std::string& spec, const std::string& symbol) {
  if (spec.rfind("cyclic:", 0) == 0) {
    int n = std::stoi(spec.substr(7));
    return FiniteGroup::cyclic(n, symbol);
  }
  if (!spec.empty() && spec.front() == '{')
    return FiniteGroup::from_json(nlohmann::json::parse(spec));
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open group file '" + spec + "'");
  nlohmann::json j;
  in >> j;
  FiniteGroup g = FiniteGroup::from_json(j);
  if (g.sampled_verification())
    std::cerr << "note: group '" << spec
              << "' is large; associativity was verified on a random sample\n";
  return g;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

struct CommonArgs {
  std::string group_a = "cyclic:2";
  std::string group_b = "cyclic:2";
  std::string word;
  std::string collection = "auto";
  int max_turns = 0;
  int max_pieces = 4;
  bool override_caps = false;
  std::string out_dir;
  std::vector<std::string> formats;
  std::uint64_t seed = 1;
  bool timings = false;

  void attach(CLI::App* cmd, bool need_word) {
    cmd->add_option("--group-a", group_a, "factor A: cyclic:N, a JSON file, or inline JSON");
    cmd->add_option("--group-b", group_b, "factor B: cyclic:N, a JSON file, or inline JSON");
    auto* w = cmd->add_option("--word", word, "word text, e.g. \"a b a^-1 b^-1\" or \"A:3 B:1\"");
    if (need_word) w->required();
    cmd->add_option("--collection", collection,
                    "piece collection: auto, generic, builtin, or a JSON file");
    cmd->add_option("--max-turns", max_turns, "per-side arc bound for generic collections");
    cmd->add_option("--max-pieces", max_pieces, "piece cap for the toy enumeration");
    cmd->add_flag("--override-caps", override_caps, "proceed past enumeration size caps");
    cmd->add_option("--out", out_dir, "output directory (or file for compute)");
    cmd->add_option("--format", formats, "export formats: json, dot, lp")
        ->delimiter(',');
    cmd->add_option("--seed", seed, "seed for randomized self checks");
    cmd->add_flag("--timings", timings, "include timings in the report JSON");
  }

  StlOptions options() const {
    StlOptions opt;
    if (collection == "auto")
      opt.collection = CollectionChoice::automatic;
    else if (collection == "generic")
      opt.collection = CollectionChoice::generic;
    else if (collection == "builtin")
      opt.collection = CollectionChoice::builtin;
    else {
      opt.collection = CollectionChoice::user;
      std::ifstream in(collection);
      if (!in) throw std::runtime_error("cannot open collection file '" + collection + "'");
      nlohmann::json j;
      in >> j;
      opt.user_collection = j;
    }
    if (max_turns > 0) opt.max_turns = max_turns;
    opt.enum_max_pieces = max_pieces;
    opt.override_caps = override_caps;
    return opt;
  }
};

int cmd_compute(const CommonArgs& args) {
  FiniteGroup A = parse_group_spec(args.group_a, "a");
  FiniteGroup B = parse_group_spec(args.group_b, "b");
  GroupPair gp{A, B};
  RawWord word = parse_word_text(gp, args.word);
  StlReport r = compute_stl(A, B, word, args.options());

  if (r.exact) {
    std::cout << rat_str(*r.value) << " (" << rat_decimal(*r.value) << ")\n";
  } else {
    std::cout << "lower bound " << rat_str(r.lower_bound) << " ("
              << rat_decimal(r.lower_bound) << ")";
    if (r.upper_bound)
      std::cout << ", upper bound " << rat_str(*r.upper_bound) << " ("
                << rat_decimal(*r.upper_bound) << ")";
    std::cout << "\n";
  }
  if (!args.out_dir.empty()) {
    std::filesystem::path out(args.out_dir);
    if (!out.has_extension()) {
      std::filesystem::create_directories(out);
      out /= "report.json";
    }
    write_file(out, report_to_json(r, args.timings).dump(2) + "\n");
  }
  return r.exact ? kExact : kBoundsOnly;
}

int cmd_export(const CommonArgs& args) {
  FiniteGroup A = parse_group_spec(args.group_a, "a");
  FiniteGroup B = parse_group_spec(args.group_b, "b");
  GroupPair gp{A, B};
  RawWord word = parse_word_text(gp, args.word);
  StlOptions opt = args.options();
  StlReport r = compute_stl(A, B, word, opt);
  if (!r.core) throw std::runtime_error("the word conjugates into a factor; nothing to export");

  CtxPtr ctx = make_context(A, B, *r.core);
  PieceCollection collection;
  switch (opt.collection) {
    case CollectionChoice::automatic:
      if (is_product_word(*ctx))
        collection = product_collection_for(ctx);
      else if (is_commutator_word(*ctx))
        collection = commutator_collection_for(ctx);
      else
        collection = generic_bounded_collection(ctx, opt.max_turns, opt.override_caps);
      break;
    case CollectionChoice::generic:
      collection = generic_bounded_collection(ctx, opt.max_turns, opt.override_caps);
      break;
    case CollectionChoice::builtin:
      collection = is_product_word(*ctx) ? product_collection_for(ctx)
                                         : commutator_collection_for(ctx);
      break;
    case CollectionChoice::user:
      collection = collection_from_json(ctx, *opt.user_collection);
      break;
  }

  std::filesystem::path out(args.out_dir.empty() ? "." : args.out_dir);
  std::filesystem::create_directories(out);
  std::vector<std::string> formats = args.formats;
  if (formats.empty()) formats = {"json", "dot", "lp"};
  for (const std::string& f : formats) {
    if (f == "json") {
      write_file(out / "collection.json", collection_to_json(collection).dump(2) + "\n");
      write_file(out / "report.json", report_to_json(r, args.timings).dump(2) + "\n");
      if (r.lp) {
        RationalLP lp = build_polyhedron(collection);
        write_file(out / "solution.json", solution_to_json(lp, *r.lp).dump(2) + "\n");
      }
      std::cout << "wrote " << (out / "collection.json").string() << ", "
                << (out / "report.json").string() << "\n";
    } else if (f == "lp") {
      write_file(out / "problem.lp", export_lp_text(build_polyhedron(collection)));
      std::cout << "wrote " << (out / "problem.lp").string() << "\n";
    } else if (f == "dot") {
      if (!r.certificate) {
        std::cerr << "no certificate surface to export\n";
        return kBoundsOnly;
      }
      write_file(out / "certificate.dot", surface_to_dot(*r.certificate));
      std::cout << "wrote " << (out / "certificate.dot").string() << "\n";
    } else {
      throw std::runtime_error("unknown format '" + f + "' (expected json, dot, or lp)");
    }
  }
  return kExact;
}

int cmd_selftest(bool quick, std::uint64_t seed) {
  SelfTestResult res = run_selftest(quick, seed);
  size_t width = 0;
  for (const auto& row : res.rows) width = std::max(width, row.name.size());
  for (const auto& row : res.rows) {
    std::cout << (row.pass ? "[ ok ] " : "[FAIL] ") << row.name
              << std::string(width - row.name.size() + 2, ' ') << "expected " << row.expected;
    if (!row.pass) std::cout << ", got " << row.computed;
    std::cout << "\n";
  }
  std::cout << (res.all_pass ? "all checks passed\n" : "some checks FAILED\n");
  return res.all_pass ? kExact : kError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact stable torsion length bounds in free products of finite groups"};
  app.require_subcommand(1);

  CommonArgs compute_args, export_args;
  CLI::App* compute = app.add_subcommand("compute", "compute bounds / exact value for a word");
  compute_args.attach(compute, true);
  CLI::App* exp = app.add_subcommand("export", "write collection JSON, LP text, DOT files");
  export_args.attach(exp, true);

  bool quick = false;
  std::uint64_t selftest_seed = 1;
  CLI::App* self = app.add_subcommand("selftest", "run the built-in formula checks");
  self->add_flag("--quick", quick, "small grids only");
  self->add_option("--seed", selftest_seed, "seed for the randomized checks");

  try {
    app.parse(argc, argv);
    if (compute->parsed()) return cmd_compute(compute_args);
    if (exp->parsed()) return cmd_export(export_args);
    if (self->parsed()) return cmd_selftest(quick, selftest_seed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const stlen::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
