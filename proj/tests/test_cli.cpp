#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "netrank/config.hpp"
#include "test_util.hpp"

using namespace netrank;

namespace {

std::string cli_path() {
  const char* p = std::getenv("NETRANK_CLI");
  REQUIRE_MESSAGE(p != nullptr, "NETRANK_CLI must point at the netrank binary");
  return p;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  std::string log = "cli_out_" + std::to_string(::getpid()) + ".log";
  std::string cmd = cli_path() + " " + args + " > " + log + " 2>&1";
  int rc = std::system(cmd.c_str());
  if (output) *output = read_file(log);
  std::remove(log.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// small, fast synthetic dataset + tight hyperparameters
std::string fast_overrides() {
  return " --set synth.n=80 --set synth.blocks=30,50 --set synth.p_in=0.3"
         " --set synth.p_out=0.05 --set imgagn.epochs=2 --set imgagn.enc_hidden=16"
         " --set imgagn.noise_dim=8 --set imgagn.gen_hidden1=16 --set imgagn.gen_hidden2=12"
         " --set gbt.rounds=15 --set rf.n_trees=10 --set n2v.walk_length=10"
         " --set n2v.walks_per_node=3 --set n2v.epochs=2 --set line.samples_per_edge=20"
         " --set dim=12 --set folds=3";
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("synth writes the three benchmark files and a manifest") {
  TempDir tmp("cli_synth");
  std::string out = tmp.file("data");
  int rc = run_cli("synth --out " + out + " --seed 5" + fast_overrides());
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(out + "/edges.tsv"));
  CHECK(std::filesystem::exists(out + "/features.csv"));
  CHECK(std::filesystem::exists(out + "/labels.csv"));
  std::string manifest = read_file(out + "/manifest.txt");
  CHECK(manifest.find("# output " + out + "/edges.tsv") != std::string::npos);
  CHECK(manifest.find("# output " + out + "/features.csv") != std::string::npos);
  CHECK(manifest.find("# output " + out + "/labels.csv") != std::string::npos);

  // same seed reproduces, different seed varies
  std::string out2 = tmp.file("data2"), out3 = tmp.file("data3");
  CHECK(run_cli("synth --out " + out2 + " --seed 5" + fast_overrides()) == 0);
  CHECK(read_file(out + "/edges.tsv") == read_file(out2 + "/edges.tsv"));
  CHECK(run_cli("synth --out " + out3 + " --seed 6" + fast_overrides()) == 0);
  CHECK(read_file(out + "/edges.tsv") != read_file(out3 + "/edges.tsv"));
}

TEST_CASE("synth rejects invalid block sizes with exit 2") {
  TempDir tmp("cli_synth_bad");
  std::string output;
  int rc = run_cli("synth --out " + tmp.file("x") + " --set synth.blocks=10,20", &output);
  CHECK(rc == 2);
  CHECK(output.find("config error") != std::string::npos);
}

TEST_CASE("embed: unknown method exits 2 naming the field") {
  TempDir tmp("cli_embed_bad");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 1" + fast_overrides()) == 0);
  std::string output;
  int rc = run_cli("embed --method gcn --edges " + data + "/edges.tsv --out " + tmp.file("e"),
                   &output);
  CHECK(rc == 2);
  CHECK(output.find("method") != std::string::npos);
  CHECK(output.find("gcn") != std::string::npos);
}

TEST_CASE("embed imgagn writes an 80-wide file by default and reruns byte-identically") {
  TempDir tmp("cli_embed");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 2" + fast_overrides()) == 0);
  std::string inputs = " --edges " + data + "/edges.tsv --features " + data +
                       "/features.csv --labels " + data + "/labels.csv";
  // default dim: drop the fast dim override deliberately
  std::string fast = " --set imgagn.epochs=1 --set imgagn.enc_hidden=16"
                     " --set imgagn.noise_dim=8 --set imgagn.gen_hidden1=16"
                     " --set imgagn.gen_hidden2=12";
  std::string e1 = tmp.file("e1"), e2 = tmp.file("e2");
  REQUIRE(run_cli("embed --method imgagn" + inputs + fast + " --seed 3 --out " + e1) == 0);
  REQUIRE(run_cli("embed --method imgagn" + inputs + fast + " --seed 3 --out " + e2) == 0);
  std::string emb = read_file(e1 + "/embeddings.tsv");
  CHECK(emb.find("# dim=80 method=imgagn seed=3") == 0);
  CHECK(emb == read_file(e2 + "/embeddings.tsv"));
  CHECK(std::filesystem::exists(e1 + "/train_log.txt"));
  std::string e3 = tmp.file("e3");
  REQUIRE(run_cli("embed --method imgagn" + inputs + fast + " --seed 4 --out " + e3) == 0);
  CHECK(emb != read_file(e3 + "/embeddings.tsv"));
}

TEST_CASE("pipeline produces predictions, metrics and a reusable manifest") {
  TempDir tmp("cli_pipe");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 7" + fast_overrides()) == 0);
  std::string inputs = " --edges " + data + "/edges.tsv --features " + data +
                       "/features.csv --labels " + data + "/labels.csv";
  std::string p1 = tmp.file("p1");
  std::string output;
  int rc = run_cli("pipeline --method node2vec --classifier gbt --seed 11" + inputs +
                       fast_overrides() + " --out " + p1,
                   &output);
  REQUIRE_MESSAGE(rc == 0, output);
  CHECK(std::filesystem::exists(p1 + "/predictions.csv"));
  CHECK(std::filesystem::exists(p1 + "/metrics.txt"));
  CHECK(std::filesystem::exists(p1 + "/embeddings.tsv"));
  std::string metrics = read_file(p1 + "/metrics.txt");
  CHECK(metrics.find("mean = ") != std::string::npos);
  CHECK(metrics.find("[percentile_overlap]") != std::string::npos);
  std::string manifest = read_file(p1 + "/manifest.txt");
  CHECK(manifest.find("# output " + p1 + "/predictions.csv") != std::string::npos);
  CHECK(manifest.find("# output " + p1 + "/metrics.txt") != std::string::npos);
  CHECK(manifest.find("# input edges") != std::string::npos);
  CHECK(manifest.find("fnv1a64=") != std::string::npos);

  // a second run from the manifest alone reproduces the outputs byte for byte
  std::string p2 = tmp.file("p2");
  int rc2 = run_cli("pipeline --config " + p1 + "/manifest.txt --out " + p2, &output);
  REQUIRE_MESSAGE(rc2 == 0, output);
  CHECK(read_file(p1 + "/predictions.csv") == read_file(p2 + "/predictions.csv"));
  CHECK(read_file(p1 + "/embeddings.tsv") == read_file(p2 + "/embeddings.tsv"));

  // a different seed changes the predictions
  std::string p3 = tmp.file("p3");
  REQUIRE(run_cli("pipeline --method node2vec --classifier gbt --seed 12" + inputs +
                  fast_overrides() + " --out " + p3) == 0);
  CHECK(read_file(p1 + "/predictions.csv") != read_file(p3 + "/predictions.csv"));
}

TEST_CASE("pipeline without labels exits 2") {
  TempDir tmp("cli_pipe_bad");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 7" + fast_overrides()) == 0);
  std::string output;
  int rc = run_cli("pipeline --edges " + data + "/edges.tsv --features " + data +
                       "/features.csv --out " + tmp.file("p"),
                   &output);
  CHECK(rc == 2);
  CHECK(output.find("labels") != std::string::npos);
}

TEST_CASE("eval consumes predictions and labels") {
  TempDir tmp("cli_eval");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 9" + fast_overrides()) == 0);
  std::string p = tmp.file("p");
  REQUIRE(run_cli("pipeline --method line --classifier dt --seed 13 --edges " + data +
                  "/edges.tsv --features " + data + "/features.csv --labels " + data +
                  "/labels.csv" + fast_overrides() + " --out " + p) == 0);
  std::string e = tmp.file("e");
  std::string output;
  int rc = run_cli("eval --predictions " + p + "/predictions.csv --labels " + data +
                       "/labels.csv --out " + e,
                   &output);
  REQUIRE_MESSAGE(rc == 0, output);
  std::string metrics = read_file(e + "/metrics.txt");
  CHECK(metrics.find("[auc]") != std::string::npos);
  CHECK(metrics.find("overall = ") != std::string::npos);
}

TEST_CASE("compare: single-cell grid") {
  TempDir tmp("cli_cmp");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 15" + fast_overrides()) == 0);
  std::string c = tmp.file("c");
  std::string output;
  int rc = run_cli("compare --set compare.methods=line --set compare.classifiers=dt --seed 17"
                   " --edges " + data + "/edges.tsv --features " + data +
                       "/features.csv --labels " + data + "/labels.csv" + fast_overrides() +
                       " --out " + c,
                   &output);
  REQUIRE_MESSAGE(rc == 0, output);
  std::string table = read_file(c + "/comparison.csv");
  CHECK(table.find("method,classifier,mean_auc,status") == 0);
  CHECK(table.find("line,dt,") != std::string::npos);
}

TEST_CASE("compare: a failing cell is marked and the exit code reflects it") {
  TempDir tmp("cli_cmp_fail");
  std::string data = tmp.file("data");
  REQUIRE(run_cli("synth --out " + data + " --seed 19" + fast_overrides()) == 0);
  std::string c = tmp.file("c");
  std::string output;
  // negative round count breaks only the gbt cells; dt still trains
  int rc = run_cli("compare --set compare.methods=line --set compare.classifiers=dt,gbt"
                   " --set gbt.rounds=-5 --seed 23 --edges " + data + "/edges.tsv --features " +
                       data + "/features.csv --labels " + data + "/labels.csv" +
                       " --set line.samples_per_edge=20 --set dim=12 --set folds=3 --out " + c,
                   &output);
  CHECK(rc == 1);  // partial failure
  std::string table = read_file(c + "/comparison.csv");
  CHECK(table.find("line,dt,0.") != std::string::npos);
  CHECK(table.find("failed:") != std::string::npos);
}

TEST_CASE("environment variables override the config file") {
  TempDir tmp("cli_env");
  write_file(tmp.file("run.cfg"), "seed = 3\nsynth.n = 40\nsynth.blocks = 15,25\n"
                                  "synth.p_in = 0.4\nsynth.p_out = 0.08\n");
  std::string o1 = tmp.file("o1"), o2 = tmp.file("o2"), o3 = tmp.file("o3");
  REQUIRE(run_cli("synth --config " + tmp.file("run.cfg") + " --out " + o1) == 0);
  // NETRANK_SEED beats the file value
  std::string log = "cli_env_" + std::to_string(::getpid()) + ".log";
  std::string cmd = "NETRANK_SEED=4 " + cli_path() + " synth --config " + tmp.file("run.cfg") +
                    " --out " + o2 + " > " + log + " 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::remove(log.c_str());
  CHECK(read_file(o1 + "/edges.tsv") != read_file(o2 + "/edges.tsv"));
  // but a flag beats the environment
  cmd = "NETRANK_SEED=4 " + cli_path() + " synth --config " + tmp.file("run.cfg") + " --seed 3" +
        " --out " + o3 + " > " + log + " 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::remove(log.c_str());
  CHECK(read_file(o1 + "/edges.tsv") == read_file(o3 + "/edges.tsv"));
}

TEST_CASE("config file values are overridden by flags") {
  TempDir tmp("cli_cfg");
  write_file(tmp.file("run.cfg"), "seed = 3\nsynth.n = 40\nsynth.blocks = 15,25\n"
                                  "synth.p_in = 0.4\nsynth.p_out = 0.08\n");
  std::string o1 = tmp.file("o1"), o2 = tmp.file("o2");
  REQUIRE(run_cli("synth --config " + tmp.file("run.cfg") + " --out " + o1) == 0);
  // flag overrides the file seed; output must differ
  REQUIRE(run_cli("synth --config " + tmp.file("run.cfg") + " --seed 4 --out " + o2) == 0);
  CHECK(read_file(o1 + "/edges.tsv") != read_file(o2 + "/edges.tsv"));
  std::string output;
  write_file(tmp.file("bad.cfg"), "not_a_key = 1\n");
  int rc = run_cli("synth --config " + tmp.file("bad.cfg") + " --out " + tmp.file("o3"), &output);
  CHECK(rc == 2);
  CHECK(output.find("not_a_key") != std::string::npos);
}

TEST_SUITE_END();
