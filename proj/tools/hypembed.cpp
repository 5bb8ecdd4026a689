// hypembed command-line tool. Talks to the library only through the C API.

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hypembed/hypembed.h"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInternal = 1;

struct Failure {
  int code;
  std::string message;
};

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Context = std::unique_ptr<hyp_context, Deleter<hyp_context, hyp_context_destroy>>;
using GraphPtr = std::unique_ptr<hyp_graph, Deleter<hyp_graph, hyp_graph_destroy>>;
using DistPtr = std::unique_ptr<hyp_distances, Deleter<hyp_distances, hyp_distances_destroy>>;
using EmbPtr = std::unique_ptr<hyp_embedding, Deleter<hyp_embedding, hyp_embedding_destroy>>;

std::string take_string(char* s) {
  std::string out(s);
  hyp_string_free(s);
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Failure{kExitInternal, "SHA-256 failed"};
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Per-run state: the library context plus what goes into the manifest.
class Run {
 public:
  Run(std::string command, CLI::App* sub) : command_(std::move(command)), sub_(sub) {
    hyp_context* raw = nullptr;
    if (hyp_context_create(&raw) != HYP_OK) throw Failure{kExitInternal, "cannot create library context"};
    ctx_.reset(raw);
  }

  hyp_context* ctx() const { return ctx_.get(); }

  void set_precision(int bits) {
    check(hyp_context_set_precision(ctx(), bits));
    bits_ = bits;
  }
  int precision() const { return bits_; }

  void check(hyp_status s) const {
    if (s == HYP_OK) return;
    std::string msg = hyp_last_error(ctx());
    const int need = hyp_last_required_bits(ctx());
    if (need > 0) {
      // Leave headroom for the angular part of the coordinates.
      msg += "; rerun with --precision " + std::to_string(need + 64) + " or more";
    }
    throw Failure{s == HYP_ERR_INPUT ? kExitInput : s == HYP_ERR_NUMERIC ? kExitNumeric : kExitInternal, msg};
  }

  std::string read(const std::string& path) {
    std::string data;
    if (path == "-") {
      if (stdin_used_) throw Failure{kExitInput, "standard input can be read only once"};
      stdin_used_ = true;
      data.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Failure{kExitInput, "cannot open '" + path + "'"};
      data.assign(std::istreambuf_iterator<char>(in), {});
    }
    inputs_.push_back({{"path", path}, {"sha256", sha256_hex(data)}});
    return data;
  }

  void write(const std::string& path, const std::string& data) {
    if (path == "-") {
      std::cout << data << std::flush;
    } else {
      std::ofstream out(path, std::ios::binary);
      if (!out || !(out << data)) throw Failure{kExitInput, "cannot write '" + path + "'"};
    }
    outputs_.push_back(path);
  }

  // Writes <primary>.manifest.json, or `override_path` if set. Nothing is
  // written for stdout output without an explicit manifest path.
  void finish(const std::string& primary, const std::string& override_path, std::uint64_t seed) {
    std::string path = override_path;
    if (path.empty()) {
      if (primary == "-") return;
      path = primary + ".manifest.json";
    }
    ordered_json m;
    m["tool"] = "hypembed";
    m["version"] = hyp_version();
    m["command"] = command_;
    ordered_json flags = ordered_json::object();
    for (const CLI::Option* opt : sub_->get_options()) {
      if (opt->get_name() == "--help") continue;
      std::string name = opt->get_lnames().empty() ? opt->get_name() : "--" + opt->get_lnames().front();
      if (opt->get_lnames().empty() && !opt->get_positional()) continue;
      if (opt->get_positional()) name = opt->get_name();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        if (opt->get_expected_max() > 1 || res.size() > 1) flags[name] = res;
        else flags[name] = res.empty() ? "" : res.front();
      } else {
        flags[name] = opt->get_default_str();
      }
    }
    m["flags"] = flags;
    m["seed"] = seed;
    m["precision"] = bits_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << m.dump(2) << '\n')) throw Failure{kExitInput, "cannot write '" + path + "'"};
  }

 private:
  std::string command_;
  CLI::App* sub_;
  Context ctx_;
  int bits_ = 53;
  bool stdin_used_ = false;
  ordered_json inputs_ = ordered_json::array();
  std::vector<std::string> outputs_;
};

// "precision=N" from an embedding header, 0 if absent.
int header_precision(const std::string& text) {
  static const std::regex re(R"(^#[^\n]*\bprecision=(\d+))");
  std::smatch m;
  if (std::regex_search(text, m, re)) return std::stoi(m[1]);
  return 0;
}

// --precision 0 means: the embedding's own precision if known, else double.
void resolve_precision(Run& run, int requested, const std::string& embedding_text = {}) {
  int bits = requested;
  if (bits == 0) bits = embedding_text.empty() ? 53 : header_precision(embedding_text);
  if (bits == 0) bits = 53;
  run.set_precision(bits);
}

GraphPtr load_graph(Run& run, const std::string& text) {
  hyp_graph* g = nullptr;
  run.check(hyp_graph_from_edge_list(run.ctx(), text.c_str(), &g));
  return GraphPtr(g);
}

DistPtr graph_distances(Run& run, const hyp_graph* g) {
  hyp_distances* d = nullptr;
  run.check(hyp_distances_from_graph(run.ctx(), g, &d));
  return DistPtr(d);
}

bool is_distance_file(const std::string& text, const std::string& format) {
  if (format == "distances") return true;
  if (format == "edges") return false;
  return hyp_text_is_distance_tsv(text.c_str()) != 0;
}

// Distances from a distance TSV or, for an edge list, its shortest paths.
// `graph` receives the graph when the input is an edge list.
DistPtr load_distances(Run& run, const std::string& text, const std::string& format, GraphPtr* graph = nullptr) {
  if (is_distance_file(text, format)) {
    hyp_distances* d = nullptr;
    run.check(hyp_distances_read_tsv(run.ctx(), text.c_str(), &d));
    return DistPtr(d);
  }
  GraphPtr g = load_graph(run, text);
  DistPtr d = graph_distances(run, g.get());
  if (graph) *graph = std::move(g);
  return d;
}

EmbPtr load_embedding(Run& run, const std::string& text) {
  hyp_embedding* e = nullptr;
  run.check(hyp_embedding_read_tsv(run.ctx(), text.c_str(), &e));
  return EmbPtr(e);
}

std::string embedding_tsv(Run& run, const hyp_embedding* e) {
  char* s = nullptr;
  run.check(hyp_embedding_write_tsv(run.ctx(), e, &s));
  return take_string(s);
}

std::string distance_tsv(Run& run, const hyp_distances* d) {
  char* s = nullptr;
  run.check(hyp_distances_write_tsv(run.ctx(), d, &s));
  return take_string(s);
}

std::string sidecar_path(const std::string& out, const std::string& given, const std::string& suffix) {
  if (!given.empty()) return given;
  return out == "-" ? std::string() : out + suffix;
}

struct Common {
  int precision = 0;
  std::string output = "-";
  std::string manifest;
};

void add_common(CLI::App* sub, Common& c, const std::string& output_help) {
  sub->add_option("-o,--output", c.output, output_help + " ('-' for stdout)")->capture_default_str();
  sub->add_option("--precision", c.precision,
                  "Mantissa bits: 53 = hardware double, otherwise MPFR; 0 = the input embedding's precision or 53")
      ->capture_default_str();
  sub->add_option("--manifest", c.manifest, "Manifest path (default <output>.manifest.json)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic embeddings of graphs and distance matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hyp_version()));

  // gen
  Common gen_c;
  std::string gen_kind;
  std::vector<int> gen_params;
  auto* gen = app.add_subcommand("gen", "Write a fixture graph as an edge list");
  gen->add_option("kind", gen_kind, "balanced_tree, chain_star, path, star, clique, steiner_star or cycle")->required();
  gen->add_option("params", gen_params, "Integer parameters of the fixture");
  add_common(gen, gen_c, "Edge list");

  // sample
  Common smp_c;
  std::string smp_in;
  double smp_ratio = 10.0;
  std::uint64_t smp_seed = 0;
  auto* smp = app.add_subcommand("sample", "Write a partially observed shortest-path matrix of a graph");
  smp->add_option("graph", smp_in, "Edge list ('-' for stdin)")->required();
  smp->add_option("--ratio", smp_ratio, "Non-edge pairs kept per edge")->capture_default_str();
  smp->add_option("--seed", smp_seed, "Sampling seed")->capture_default_str();
  add_common(smp, smp_c, "Distance TSV");

  // complete
  Common cmp_c;
  std::string cmp_in, cmp_format = "auto";
  auto* cmp = app.add_subcommand("complete", "Fill missing distances with shortest paths through observed ones");
  cmp->add_option("input", cmp_in, "Distance TSV or edge list ('-' for stdin)")->required();
  cmp->add_option("--format", cmp_format, "Input kind")->check(CLI::IsMember({"auto", "distances", "edges"}))->capture_default_str();
  add_common(cmp, cmp_c, "Distance TSV");

  // embed-tree
  Common et_c;
  std::string et_in;
  hyp_tree_options et_opts;
  hyp_tree_options_default(&et_opts);
  bool et_closure = false;
  double et_base = 2.0;
  bool et_code = false;
  auto* et = app.add_subcommand("embed-tree", "Combinatorial embedding of a tree (or of a graph's BFS tree)");
  et->add_option("graph", et_in, "Edge list ('-' for stdin)")->required();
  et->add_option("--eps", et_opts.epsilon, "Target worst-case distortion 1 + eps")->capture_default_str();
  et->add_option("--tau", et_opts.tau, "Edge scaling factor; 0 derives it from --eps")->capture_default_str();
  et->add_option("--dim", et_opts.dim, "Embedding dimension")->capture_default_str();
  et->add_option("--root", et_opts.root, "Root node index for the BFS tree")->capture_default_str();
  et->add_flag("--closure-weights", et_closure, "Weight depth-s edges by base^s");
  et->add_option("--closure-base", et_base, "Base for --closure-weights")->capture_default_str();
  et->add_flag("--force-code", et_code, "Use the hypercube code placement in 2 dimensions too");
  add_common(et, et_c, "Embedding TSV");

  // embed-hmds
  Common hm_c;
  std::string hm_in, hm_format = "auto", hm_recenter = "karcher", hm_report;
  int hm_rank = 2;
  auto* hm = app.add_subcommand("embed-hmds", "Exact hyperbolic MDS of a distance matrix");
  hm->add_option("input", hm_in, "Distance TSV or edge list ('-' for stdin)")->required();
  hm->add_option("--rank", hm_rank, "Embedding dimension")->capture_default_str();
  hm->add_option("--recenter", hm_recenter, "Post-hoc centering")
      ->check(CLI::IsMember({"none", "karcher", "pseudo_euclidean"}))
      ->capture_default_str();
  hm->add_option("--format", hm_format, "Input kind")->check(CLI::IsMember({"auto", "distances", "edges"}))->capture_default_str();
  hm->add_option("--report", hm_report, "JSON report path (default <output>.json)");
  add_common(hm, hm_c, "Embedding TSV");

  // embed-sgd
  Common sg_c;
  std::string sg_in, sg_format = "auto", sg_weighting = "none", sg_warm, sg_trace;
  hyp_sgd_options sg_opts;
  hyp_sgd_options_default(&sg_opts);
  double sg_ratio = 0.0;
  auto* sg = app.add_subcommand("embed-sgd", "Embedding by Riemannian gradient descent with a learned scale");
  sg->add_option("input", sg_in, "Distance TSV or edge list ('-' for stdin)")->required();
  sg->add_option("--rank", sg_opts.rank, "Embedding dimension")->capture_default_str();
  sg->add_option("--epochs", sg_opts.epochs, "Passes over the observed pairs")->capture_default_str();
  sg->add_option("--lr", sg_opts.lr, "Learning rate")->capture_default_str();
  sg->add_option("--tau-init", sg_opts.tau_init, "Initial scale (floored at 0.1)")->capture_default_str();
  sg->add_option("--weighting", sg_weighting, "none or exp:BETA")->capture_default_str();
  sg->add_option("--warm-start", sg_warm, "Embedding TSV to start from");
  sg->add_option("--sample-ratio", sg_ratio, "Observe edges plus ratio*|E| random pairs (edge-list input); 0 = all")
      ->capture_default_str();
  sg->add_option("--seed", sg_opts.seed, "Initialization and sampling seed")->capture_default_str();
  sg->add_option("--format", sg_format, "Input kind")->check(CLI::IsMember({"auto", "distances", "edges"}))->capture_default_str();
  sg->add_option("--loss-trace", sg_trace, "Loss trace CSV path (default <output>.loss.csv)");
  add_common(sg, sg_c, "Embedding TSV");

  // reduce-pga
  Common pg_c;
  std::string pg_in;
  hyp_pga_options pg_opts;
  hyp_pga_options_default(&pg_opts);
  auto* pg = app.add_subcommand("reduce-pga", "Fit the first principal geodesic of an embedding");
  pg->add_option("embedding", pg_in, "Embedding TSV ('-' for stdin)")->required();
  pg->add_option("--restarts", pg_opts.restarts, "Random restarts of the direction search")->capture_default_str();
  pg->add_option("--seed", pg_opts.seed, "Restart seed")->capture_default_str();
  add_common(pg, pg_c, "JSON report");

  // eval
  Common ev_c;
  std::string ev_graph, ev_emb, ev_dist;
  int ev_hops = 2;
  auto* ev = app.add_subcommand("eval", "MAP and distortion of an embedding against a graph");
  ev->add_option("graph", ev_graph, "Edge list")->required();
  ev->add_option("embedding", ev_emb, "Embedding TSV ('-' for stdin)")->required();
  ev->add_option("--k-hops", ev_hops, "Neighborhood radius for k_map")->capture_default_str();
  ev->add_option("--distances", ev_dist, "Ground-truth distance TSV (default: graph shortest paths)");
  add_common(ev, ev_c, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (gen->parsed()) {
      Run run("gen", gen);
      resolve_precision(run, gen_c.precision);
      hyp_graph* g = nullptr;
      run.check(hyp_graph_generate(run.ctx(), gen_kind.c_str(), gen_params.data(), gen_params.size(), &g));
      GraphPtr graph(g);
      char* s = nullptr;
      run.check(hyp_graph_to_edge_list(run.ctx(), graph.get(), &s));
      run.write(gen_c.output, take_string(s));
      run.finish(gen_c.output, gen_c.manifest, 0);
    } else if (smp->parsed()) {
      Run run("sample", smp);
      resolve_precision(run, smp_c.precision);
      GraphPtr g = load_graph(run, run.read(smp_in));
      DistPtr full = graph_distances(run, g.get());
      hyp_distances* s = nullptr;
      run.check(hyp_distances_sample(run.ctx(), full.get(), g.get(), smp_ratio, smp_seed, &s));
      DistPtr sampled(s);
      run.write(smp_c.output, distance_tsv(run, sampled.get()));
      run.finish(smp_c.output, smp_c.manifest, smp_seed);
    } else if (cmp->parsed()) {
      Run run("complete", cmp);
      resolve_precision(run, cmp_c.precision);
      DistPtr d = load_distances(run, run.read(cmp_in), cmp_format);
      hyp_distances* c = nullptr;
      run.check(hyp_distances_complete(run.ctx(), d.get(), &c));
      DistPtr full(c);
      run.write(cmp_c.output, distance_tsv(run, full.get()));
      run.finish(cmp_c.output, cmp_c.manifest, 0);
    } else if (et->parsed()) {
      Run run("embed-tree", et);
      resolve_precision(run, et_c.precision);
      GraphPtr g = load_graph(run, run.read(et_in));
      et_opts.closure_base = et_closure ? et_base : 0.0;
      et_opts.force_code = et_code ? 1 : 0;
      hyp_embedding* e = nullptr;
      run.check(hyp_embed_tree(run.ctx(), g.get(), &et_opts, &e));
      EmbPtr emb(e);
      run.write(et_c.output, embedding_tsv(run, emb.get()));
      std::cerr << "embed-tree: " << hyp_embedding_size(emb.get()) << " nodes, dim " << hyp_embedding_dim(emb.get())
                << ", tau " << hyp_embedding_scale(emb.get()) << ", " << run.precision() << " bits\n";
      run.finish(et_c.output, et_c.manifest, 0);
    } else if (hm->parsed()) {
      Run run("embed-hmds", hm);
      resolve_precision(run, hm_c.precision);
      DistPtr d = load_distances(run, run.read(hm_in), hm_format);
      hyp_hmds_options o;
      hyp_hmds_options_default(&o);
      o.rank = hm_rank;
      o.recenter = hm_recenter == "none"      ? HYP_RECENTER_NONE
                   : hm_recenter == "karcher" ? HYP_RECENTER_KARCHER
                                              : HYP_RECENTER_PSEUDO_EUCLIDEAN;
      hyp_embedding* e = nullptr;
      char* report = nullptr;
      run.check(hyp_embed_hmds(run.ctx(), d.get(), &o, &e, &report));
      EmbPtr emb(e);
      const std::string rep = take_string(report);
      run.write(hm_c.output, embedding_tsv(run, emb.get()));
      const std::string rep_path = sidecar_path(hm_c.output, hm_report, ".json");
      if (!rep_path.empty()) run.write(rep_path, rep);
      for (const auto& w : nlohmann::json::parse(rep)["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
      run.finish(hm_c.output, hm_c.manifest, 0);
    } else if (sg->parsed()) {
      Run run("embed-sgd", sg);
      resolve_precision(run, sg_c.precision);
      if (sg_weighting == "none") {
        sg_opts.beta = 0.0;
      } else if (sg_weighting.rfind("exp:", 0) == 0) {
        try {
          std::size_t used = 0;
          sg_opts.beta = std::stod(sg_weighting.substr(4), &used);
          if (used != sg_weighting.size() - 4 || sg_opts.beta < 0) throw std::invalid_argument("beta");
        } catch (const std::logic_error&) {
          throw Failure{kExitInput, "--weighting expects exp:BETA with BETA >= 0, got '" + sg_weighting + "'"};
        }
      } else {
        throw Failure{kExitInput, "--weighting expects none or exp:BETA, got '" + sg_weighting + "'"};
      }
      GraphPtr g;
      DistPtr d = load_distances(run, run.read(sg_in), sg_format, &g);
      if (sg_ratio > 0) {
        if (!g) throw Failure{kExitInput, "--sample-ratio needs an edge-list input"};
        hyp_distances* s = nullptr;
        run.check(hyp_distances_sample(run.ctx(), d.get(), g.get(), sg_ratio, sg_opts.seed, &s));
        d.reset(s);
      }
      EmbPtr warm;
      if (!sg_warm.empty()) warm = load_embedding(run, run.read(sg_warm));
      hyp_embedding* e = nullptr;
      char* trace = nullptr;
      run.check(hyp_embed_sgd(run.ctx(), d.get(), &sg_opts, warm.get(), &e, &trace));
      EmbPtr emb(e);
      const std::string tr = take_string(trace);
      run.write(sg_c.output, embedding_tsv(run, emb.get()));
      const std::string tr_path = sidecar_path(sg_c.output, sg_trace, ".loss.csv");
      if (!tr_path.empty()) run.write(tr_path, tr);
      run.finish(sg_c.output, sg_c.manifest, sg_opts.seed);
    } else if (pg->parsed()) {
      Run run("reduce-pga", pg);
      const std::string text = run.read(pg_in);
      resolve_precision(run, pg_c.precision, text);
      EmbPtr emb = load_embedding(run, text);
      char* report = nullptr;
      run.check(hyp_reduce_pga(run.ctx(), emb.get(), &pg_opts, &report));
      run.write(pg_c.output, take_string(report));
      run.finish(pg_c.output, pg_c.manifest, pg_opts.seed);
    } else if (ev->parsed()) {
      Run run("eval", ev);
      const std::string graph_text = run.read(ev_graph);
      const std::string emb_text = run.read(ev_emb);
      resolve_precision(run, ev_c.precision, emb_text);
      GraphPtr g = load_graph(run, graph_text);
      EmbPtr emb = load_embedding(run, emb_text);
      DistPtr truth;
      if (!ev_dist.empty()) truth = load_distances(run, run.read(ev_dist), "distances");
      hyp_fidelity f;
      run.check(hyp_evaluate(run.ctx(), g.get(), truth.get(), emb.get(), ev_hops, &f));
      ordered_json j;
      j["map"] = f.map;
      j["k_map"] = f.k_map;
      j["k_hops"] = f.k_hops;
      j["distortion_avg"] = f.distortion_avg;
      j["distortion_wc"] = f.distortion_wc;
      j["n"] = f.n;
      j["pairs"] = f.pairs;
      run.write(ev_c.output, j.dump(2) + "\n");
      run.finish(ev_c.output, ev_c.manifest, 0);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
