// fastsubs: top-K lexical substitutes under a back-off n-gram model.
//
//   fastsubs subs  -m model.arpa -i text.txt -k 100 [--oracle] [--threads 8]
//   fastsubs check -m model.arpa -c text.txt -k 1,5,V --sample 500
//   fastsubs bench -m model.arpa -c text.txt -k 1,4,16,64 --sample 200
//   fastsubs synth --vocab 10000 --tokens 1000000 --order 4 --corpus c.txt --arpa m.arpa
//
// Exit codes: 0 ok, 1 usage, 2 I/O or parse error, 3 differential mismatch.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fastsubs/driver.hpp"
#include "fastsubs/lm.hpp"
#include "fastsubs/synth.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedModel {
  fastsubs::NgramLM lm;
  fastsubs::AlphaIndex index;
};

LoadedModel load_model(const std::string& path, bool order_check) {
  auto start = std::chrono::steady_clock::now();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  fastsubs::NgramLM lm = fastsubs::parse_arpa(in);
  if (order_check && lm.order() < 2) {
    std::cerr << "warning: model order " << lm.order() << " uses no context\n";
  }
  fastsubs::AlphaIndex index(lm);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "loaded order-" << lm.order() << " model, " << lm.vocab().size() << " words, "
            << index.total_pairs() << " index entries in " << ms << " ms\n";
  return {std::move(lm), std::move(index)};
}

fastsubs::Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return fastsubs::read_corpus(in);
}

fastsubs::BlockPolicy parse_policy(const std::string& name) {
  if (name == "max-sup") return fastsubs::BlockPolicy::kMaxSup;
  if (name == "round-robin") return fastsubs::BlockPolicy::kRoundRobin;
  throw CLI::ValidationError("--policy", "expected max-sup or round-robin");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact top-K lexical substitutes under a back-off n-gram language model"};
  app.require_subcommand(1);

  std::string model_path, input_path, corpus_path, k_spec = "10", policy_name = "round-robin";
  std::size_t k = 10, sample = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool oracle = false, include_unk = false, exclude_target = false, order_check = false, corrupt = false;

  auto* subs = app.add_subcommand("subs", "Top-K substitutes for every token of every input line");
  subs->add_option("-m,--model", model_path, "ARPA model file")->required();
  subs->add_option("-i,--input", input_path, "Input text, one tokenized sentence per line (default stdin)");
  subs->add_option("-k", k, "Substitutes per token")->check(CLI::PositiveNumber);
  subs->add_flag("--oracle", oracle, "Use the exhaustive scorer instead of the search");
  subs->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "Compare the search against the exhaustive scorer");
  auto* bench = app.add_subcommand("bench", "Measure pop counts as a CSV");
  for (auto* cmd : {check, bench}) {
    cmd->add_option("-m,--model", model_path, "ARPA model file")->required();
    cmd->add_option("-c,--corpus", corpus_path, "Text to sample query positions from")->required();
    cmd->add_option("-k", k_spec, "Comma-separated K values; V means the whole vocabulary");
    cmd->add_option("--sample", sample, "Number of query positions");
    cmd->add_option("--seed", seed, "Sampling seed");
  }
  check->add_flag("--corrupt-index", corrupt, "Shift every indexed alpha (fault injection)");

  for (auto* cmd : {subs, check, bench}) {
    cmd->add_flag("--include-unk", include_unk, "Allow <unk> as a substitute");
    cmd->add_flag("--order-check", order_check, "Warn when the model has order < 2");
    cmd->add_option("--policy", policy_name, "Block selection: max-sup or round-robin");
  }
  subs->add_flag("--exclude-target", exclude_target, "Never return the original word");

  fastsubs::SynthConfig cfg;
  std::string arpa_out, test_out;
  std::size_t test_tokens = 0;
  std::uint64_t test_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a Zipfian corpus and a toy back-off model");
  synth->add_option("--vocab", cfg.vocab_size, "Vocabulary size, reserved tokens included");
  synth->add_option("--tokens", cfg.tokens, "Corpus tokens");
  synth->add_option("--zipf", cfg.zipf_s, "Zipf exponent");
  synth->add_option("--order", cfg.order, "Model order");
  synth->add_option("--discount", cfg.discount, "Absolute discount in (0,1)");
  synth->add_option("--seed", cfg.seed, "Random seed");
  synth->add_option("--sentence-length", cfg.mean_sentence_length, "Mean sentence length");
  synth->add_option("--corpus", corpus_path, "Write the training corpus here");
  synth->add_option("--arpa", arpa_out, "Write the estimated model here");
  synth->add_option("--test-corpus", test_out, "Also write a held-out corpus from another seed");
  synth->add_option("--test-tokens", test_tokens, "Held-out corpus tokens (default: a tenth of --tokens)");
  synth->add_option("--test-seed", test_seed, "Held-out corpus seed (default: --seed + 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    fastsubs::BlockPolicy policy = parse_policy(policy_name);
    fastsubs::CandidateFilter filter;
    filter.include_unk = include_unk;

    if (*subs) {
      LoadedModel model = load_model(model_path, order_check);
      fastsubs::SubsOptions options;
      options.k = k;
      options.oracle = oracle;
      options.include_unk = include_unk;
      options.exclude_target = exclude_target;
      options.threads = threads;
      options.policy = policy;
      std::ios::sync_with_stdio(false);
      if (input_path.empty()) {
        fastsubs::run_subs(model.lm, model.index, std::cin, std::cout, std::cerr, options);
      } else {
        std::ifstream in(input_path);
        if (!in) throw IoError("cannot open input file: " + input_path);
        fastsubs::run_subs(model.lm, model.index, in, std::cout, std::cerr, options);
      }
      std::cout.flush();
      if (!std::cout) throw IoError("failed writing output");
      return 0;
    }

    if (*check) {
      LoadedModel model = load_model(model_path, order_check);
      if (corrupt) model.index.corrupt_for_testing(-1.0);
      fastsubs::CheckOptions options;
      options.ks = fastsubs::parse_k_list(k_spec, fastsubs::eligible_count(model.lm, filter));
      options.sample_size = sample;
      options.seed = seed;
      options.filter = filter;
      options.policy = policy;
      auto report = fastsubs::run_check(model.lm, model.index, load_corpus(corpus_path), options, std::cout);
      return report.ok() ? 0 : kExitMismatch;
    }

    if (*bench) {
      LoadedModel model = load_model(model_path, order_check);
      fastsubs::BenchOptions options;
      options.ks = fastsubs::parse_k_list(k_spec, fastsubs::eligible_count(model.lm, filter));
      options.sample_size = sample;
      options.seed = seed;
      options.filter = filter;
      options.policy = policy;
      fastsubs::run_bench(model.lm, model.index, load_corpus(corpus_path), options, std::cout);
      return 0;
    }

    if (*synth) {
      cfg.validate();
      if (corpus_path.empty() && arpa_out.empty()) throw CLI::ValidationError("synth", "nothing to write");
      fastsubs::Corpus corpus = fastsubs::gen_corpus(cfg);
      if (!corpus_path.empty()) {
        std::ofstream out(corpus_path);
        if (!out) throw IoError("cannot write " + corpus_path);
        fastsubs::write_corpus(corpus, out);
      }
      if (!arpa_out.empty()) {
        std::ofstream out(arpa_out);
        if (!out) throw IoError("cannot write " + arpa_out);
        fastsubs::estimate_arpa(corpus, cfg.order, cfg.discount, out);
      }
      if (!test_out.empty()) {
        fastsubs::SynthConfig held = cfg;
        held.seed = test_seed ? test_seed : cfg.seed + 1;
        held.tokens = test_tokens ? test_tokens : std::max<std::size_t>(1, cfg.tokens / 10);
        std::ofstream out(test_out);
        if (!out) throw IoError("cannot write " + test_out);
        fastsubs::write_corpus(fastsubs::gen_corpus(held), out);
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
