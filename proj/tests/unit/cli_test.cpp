#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "fixtures.hpp"
#include "hygiene/error.hpp"

namespace hygiene::cli {
namespace {

using hygiene::testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("cli");
    data_ = (dir_->path() / "data").string();
    ASSERT_EQ(invoke({"synth", "--n-per-class", "10", "--seed", "3", "--out", data_}).code, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string out_dir(const std::string& leaf) { return (dir_->path() / leaf).string(); }

  static TempDir* dir_;
  static std::string data_;
};

TempDir* CliTest::dir_ = nullptr;
std::string CliTest::data_;

TEST_F(CliTest, UsageErrors) {
  auto r = invoke({});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  r = invoke({"train", "--nonsense"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--model"), std::string::npos);
  r = invoke({"compare", "--k", "many"});
  EXPECT_EQ(r.code, kExitUsage);
  r = invoke({"trial", "--model", "knn"});
  EXPECT_EQ(r.code, kExitUsage);
  r = invoke({"frobnicate"});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST_F(CliTest, HelpExitsCleanly) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("compare"), std::string::npos);
}

TEST_F(CliTest, ShowConfigAppliesPrecedence) {
  const auto cfg_path = dir_->path() / "run.cfg";
  std::ofstream(cfg_path) << "# test\nseed = 11\nk = 4\nmodel = rf\n";
  const auto r = invoke({"train", "--config", cfg_path.string(), "--seed", "12", "--show-config"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("seed = 12"), std::string::npos);
  EXPECT_NE(r.out.find("k = 4"), std::string::npos);
  EXPECT_NE(r.out.find("model = rf"), std::string::npos);
  EXPECT_NE(r.out.find("budget = 30"), std::string::npos);
}

TEST_F(CliTest, BadConfigFileIsUsageError) {
  const auto cfg_path = dir_->path() / "bad.cfg";
  std::ofstream(cfg_path) << "seed = 1\nwat = 2\n";
  const auto r = invoke({"train", "--config", cfg_path.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("bad.cfg"), std::string::npos);
}

TEST_F(CliTest, IngestReportsMatches) {
  const auto out = out_dir("ingest");
  const auto r = invoke({"ingest", "--input", data_, "--out", out});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(hygiene::testing::read_text(out + "/ingest.json"));
  EXPECT_EQ(j["matched"], 30);
  EXPECT_EQ(j["config"]["input"], data_);
}

TEST_F(CliTest, IngestFlagsMissingRecording) {
  const auto copy = dir_->path() / "broken";
  std::filesystem::copy(data_, copy, std::filesystem::copy_options::recursive);
  std::filesystem::remove(copy / "recordings" / "BF_0002.csv");
  const auto r = invoke({"ingest", "--input", copy.string(), "--out", out_dir("ingest_broken")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("BF_0002"), std::string::npos);
  EXPECT_NE(r.err.find("experiment_log.csv"), std::string::npos);
}

TEST_F(CliTest, MalformedRecordingNamesFileAndRow) {
  const auto copy = dir_->path() / "malformed";
  std::filesystem::copy(data_, copy, std::filesystem::copy_options::recursive);
  std::ofstream(copy / "recordings" / "KS_0001.csv") << "timestamp_ms,counts\n0,1\n10,oops\n";
  const auto r = invoke({"features", "--input", copy.string(), "--out", out_dir("feat_bad")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("KS_0001.csv"), std::string::npos);
  EXPECT_NE(r.err.find("3"), std::string::npos);
}

TEST_F(CliTest, FeaturesTrainEvaluate) {
  const auto feats = out_dir("feats");
  ASSERT_EQ(invoke({"features", "--input", data_, "--out", feats}).code, kExitOk);
  EXPECT_TRUE(std::filesystem::exists(feats + "/labels.csv"));
  const auto model = out_dir("models") + "/svm.json";
  auto r = invoke({"train", "--input", feats, "--select-features", "--budget", "4", "--model-path", model});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(hygiene::testing::read_text(model));
  EXPECT_EQ(j["features"].size(), 3u);
  EXPECT_EQ(j["family"], "svm");

  const auto eval = out_dir("eval");
  r = invoke({"evaluate", "--input", feats, "--model-path", model, "--out", eval});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ej = nlohmann::json::parse(hygiene::testing::read_text(eval + "/evaluation.json"));
  EXPECT_EQ(ej["report"]["total"], 30);
  EXPECT_GE(ej["report"]["accuracy"].get<double>(), 0.8);
  const auto text = hygiene::testing::read_text(eval + "/evaluation.txt");
  EXPECT_EQ(text.rfind("# hygiene evaluate", 0), 0u);
}

TEST_F(CliTest, PairModelEvaluatesOnlyItsClasses) {
  const auto out = out_dir("pair");
  ASSERT_EQ(invoke({"train", "--input", data_, "--model", "dt", "--pair", "KS,TF", "--out", out}).code, kExitOk);
  const auto r = invoke({"evaluate", "--input", data_, "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ej = nlohmann::json::parse(hygiene::testing::read_text(out + "/evaluation.json"));
  EXPECT_EQ(ej["report"]["total"], 20);
}

TEST_F(CliTest, MismatchedLabelsAndValues) {
  const auto feats = out_dir("feats_mis");
  ASSERT_EQ(invoke({"features", "--input", data_, "--out", feats}).code, kExitOk);
  std::ofstream(feats + "/short_labels.csv") << "0\n1\n";
  const auto r = invoke({"evaluate", "--labels", feats + "/short_labels.csv", "--values", feats + "/values.csv",
                         "--model-path", feats + "/none.json", "--out", out_dir("mis")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("short_labels.csv"), std::string::npos);
  EXPECT_NE(r.err.find("values.csv"), std::string::npos);
}

TEST_F(CliTest, MissingModelIsDataError) {
  const auto r = invoke({"evaluate", "--input", data_, "--model-path", out_dir("nowhere.json")});
  EXPECT_EQ(r.code, kExitData);
}

TEST_F(CliTest, CompareListsSixFamilies) {
  const auto out = out_dir("compare");
  const auto r = invoke({"compare", "--input", data_, "--k", "5", "--seed", "3", "--budget", "3", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(hygiene::testing::read_text(out + "/compare.json"));
  std::vector<std::string> labels;
  for (const auto& row : j["results"]) labels.push_back(row["model"]);
  EXPECT_EQ(labels, (std::vector<std::string>{"DT", "RF", "NB", "LR", "SVM", "NN"}));
  EXPECT_NE(r.out.find("±"), std::string::npos);
}

TEST_F(CliTest, TrialWritesAllPairs) {
  const auto out = out_dir("trial");
  const auto r = invoke({"trial", "--input", data_, "--attempts", "2", "--budget", "2", "--k", "2", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* stem : {"trial_KS_BF", "trial_BF_TF", "trial_KS_TF"}) {
    EXPECT_TRUE(std::filesystem::exists(out + "/" + stem + ".csv")) << stem;
    EXPECT_TRUE(std::filesystem::exists(out + "/" + stem + "_trace.csv")) << stem;
  }
}

TEST_F(CliTest, InputsAreNotModified) {
  const auto before = hygiene::testing::snapshot(data_);
  ASSERT_EQ(invoke({"features", "--input", data_, "--out", out_dir("ro")}).code, kExitOk);
  ASSERT_EQ(invoke({"ingest", "--input", data_, "--out", out_dir("ro")}).code, kExitOk);
  EXPECT_EQ(hygiene::testing::snapshot(data_), before);
}

TEST(Config, SetAndEntries) {
  PipelineConfig cfg;
  cfg.set("band", "2,30");
  EXPECT_EQ(cfg.band.low_hz, 2.0);
  EXPECT_EQ(cfg.band.high_hz, 30.0);
  cfg.set("nn.hidden", "32,4");
  EXPECT_EQ(cfg.spec.mlp.hidden, (std::vector<std::size_t>{32, 4}));
  EXPECT_THROW(cfg.set("band", "30"), hygiene::Error);
  EXPECT_THROW(cfg.set("k", "-1"), hygiene::Error);
  EXPECT_THROW(cfg.set("no.such", "1"), hygiene::Error);
  PipelineConfig copy;
  for (const auto& [k, v] : cfg.entries()) copy.set(k, v);
  EXPECT_EQ(copy.entries(), cfg.entries());
}

}  // namespace
}  // namespace hygiene::cli
