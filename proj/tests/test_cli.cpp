#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "sroc/cli.hpp"
#include "sroc/error.hpp"
#include "sroc/simulate.hpp"

using namespace sroc;
namespace fs = std::filesystem;

namespace {

const std::string kData = SROC_TEST_DATA;

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("sroc_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sroc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

ErrorKind parse_error(std::string_view text) {
  try {
    cli::parse_dataset_text(text, "t");
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error");
  return ErrorKind::Io;
}

std::string parse_message(std::string_view text) {
  try {
    cli::parse_dataset_text(text, "t");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse valid files") {
  const auto ds = cli::parse_dataset(kData + "/no_group.csv");
  CHECK(ds.label == "no_group");
  REQUIRE(ds.records.size() == 4);
  CHECK(ds.records[0].reader_id == "r1");
  CHECK(ds.records[3].table == ContingencyTable{25, 3, 25, 47});
  CHECK_FALSE(ds.records[0].group.has_value());

  const auto grouped = cli::parse_dataset(kData + "/fixture.csv", std::string("specialty"));
  CHECK(grouped.records.size() == 8);
  CHECK(grouped.records[4].group == "resident");

  const auto crlf = cli::parse_dataset_text("\xEF\xBB\xBFreader_id,tp,fp,fn,tn\r\n\"a,b\",1,2,3,4\r\nc,5,0,0,9\r\n", "x");
  REQUIRE(crlf.records.size() == 2);
  CHECK(crlf.records[0].reader_id == "a,b");
  CHECK(crlf.records[1].table == ContingencyTable{5, 0, 0, 9});
}

TEST_CASE("parse errors name line and field") {
  const std::string bad = "reader_id,tp,fp,fn,tn\nr1,10,2,3,4\nr2,-1,2,3,4\n";
  CHECK(parse_error(bad) == ErrorKind::Validation);
  const std::string msg = parse_message(bad);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("tp") != std::string::npos);
  CHECK(parse_message("reader_id,tp,fp,fn,tn\nr1,10,2.5,3,4\n").find("fp") != std::string::npos);
  CHECK(parse_error("reader_id,tp,fp,fn,tn\nr1,1,2,3,4\nr1,5,6,7,8\n") == ErrorKind::DuplicateReader);
  CHECK(parse_error("reader,tp,fp,fn,tn\nr1,1,2,3,4\n") == ErrorKind::MalformedHeader);
  CHECK(parse_error("reader_id,tp,fn,fp,tn\nr1,1,2,3,4\n") == ErrorKind::MalformedHeader);
  CHECK(parse_error("") == ErrorKind::MalformedHeader);
  CHECK(parse_error("reader_id,tp,fp,fn,tn\nr1,1,2,3\n") == ErrorKind::Validation);
  CHECK(parse_error("reader_id,tp,fp,fn,tn\n") == ErrorKind::InsufficientData);
  CHECK_THROWS_AS(cli::parse_dataset(kData + "/missing.csv"), Error);
  CHECK_THROWS_AS(cli::parse_dataset(kData + "/no_group.csv", std::string("specialty")), Error);
}

TEST_CASE("csv round trip") {
  SimConfig c;
  c.tau = 0.4;
  c.seed = 3;
  auto ds = generate(c);
  for (std::size_t i = 0; i < ds.records.size(); ++i) ds.records[i].group = i % 2 ? "b" : "a";
  const auto text = cli::serialize_dataset(ds);
  const auto back = cli::parse_dataset_text(text, ds.label, std::string("group"));
  REQUIRE(back.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(back.records[i].reader_id == ds.records[i].reader_id);
    CHECK(back.records[i].group == ds.records[i].group);
    CHECK(back.records[i].table == ds.records[i].table);
  }
  CHECK(cli::serialize_dataset(back) == text);
}

TEST_CASE("sim config files") {
  const auto c = cli::apply_sim_config("# study\nn_readers = 7\ntau=0.3\n\nseed=12\n", SimConfig{}, {"tau"});
  CHECK(c.n_readers == 7);
  CHECK(c.tau == 0.0);
  CHECK(c.seed == 12);
  CHECK_THROWS_AS(cli::apply_sim_config("bogus=1\n", SimConfig{}), Error);
  CHECK_THROWS_AS(cli::apply_sim_config("n_readers=x\n", SimConfig{}), Error);
  CHECK_THROWS_AS(cli::apply_sim_config("n_readers\n", SimConfig{}), Error);
}

TEST_CASE("analyze writes outputs matching the golden files") {
  TempDir tmp("golden");
  const auto r = invoke({"analyze", kData + "/fixture.csv", "--model", "both", "--effects", "random", "--json-out",
                         tmp / "r.json", "--svg-out", tmp / "r.svg"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(slurp(tmp / "r.json") == slurp(kData + "/golden_report.json"));
  CHECK(slurp(tmp / "r.svg") == slurp(kData + "/golden_report.svg"));

  const auto g = invoke({"analyze", kData + "/fixture.csv", "--group-column", "specialty", "--ai-auc", "0.85",
                         "--ai-auc-ci", "0.80", "0.90", "--seed", "7", "--threads", "3", "--json-out", tmp / "g.json",
                         "--svg-out", tmp / "g.svg"});
  CHECK(g.code == 0);
  CHECK(slurp(tmp / "g.json") == slurp(kData + "/golden_grouped.json"));
  CHECK(slurp(tmp / "g.svg") == slurp(kData + "/golden_grouped.svg"));
}

TEST_CASE("standalone binary") {
  TempDir tmp("binary");
  const std::string cmd = std::string(SROC_TOOL) + " analyze " + kData + "/fixture.csv --json-out " + (tmp / "r.json") +
                          " 2>" + (tmp / "err.txt");
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(tmp / "r.json") == slurp(kData + "/golden_report.json"));
  CHECK(std::system((std::string(SROC_TOOL) + " analyze " + (tmp / "nope.csv") + " 2>/dev/null").c_str()) != 0);
}

TEST_CASE("ai comparison plumbing") {
  const auto r = invoke({"analyze", kData + "/fixture.csv", "--model", "phm", "--ai-auc", "0.94"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.contains("ai_comparison"));
  const auto& a = j["ai_comparison"];
  CHECK(a["human_engine"] == "phm");
  CHECK(a["difference"].get<double>() ==
        doctest::Approx(j["fits"][0]["auc"].get<double>() - 0.94).epsilon(1e-5));
  CHECK(j["fits"].size() == 1);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"analyze", kData + "/missing.csv"}).code == 2);
  CHECK(invoke({"analyze", kData + "/fixture.csv", "--frobnicate"}).code == 2);
  CHECK(invoke({"analyze", kData + "/fixture.csv", "--model", "hsroc"}).code == 2);
  CHECK(invoke({"analyze", kData + "/fixture.csv", "--level", "1.5"}).code == 2);
  CHECK(invoke({"analyze", kData + "/fixture.csv", "--bootstrap-b", "10"}).code == 2);
  CHECK(invoke({"analyze", kData + "/fixture.csv", "--ai-auc-ci", "0.8", "0.9"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
  TempDir tmp("codes");
  spit(tmp / "dup.csv", "reader_id,tp,fp,fn,tn\nr1,1,2,3,4\nr1,5,6,7,8\n");
  const auto dup = invoke({"analyze", tmp / "dup.csv"});
  CHECK(dup.code == 2);
  CHECK(dup.err.find("parse") != std::string::npos);
  spit(tmp / "one.csv", "reader_id,tp,fp,fn,tn\nr1,40,5,10,45\n");
  CHECK(invoke({"analyze", tmp / "one.csv", "--model", "bivariate"}).code == 2);
}

TEST_CASE("simulate and coverage subcommands") {
  TempDir tmp("sim");
  const auto a = invoke({"simulate", "--n-readers", "6", "--seed", "4", "--tau", "0.2"});
  REQUIRE(a.code == 0);
  CHECK(invoke({"simulate", "--n-readers", "6", "--seed", "4", "--tau", "0.2"}).out == a.out);
  const auto ds = cli::parse_dataset_text(a.out, "sim");
  CHECK(ds.records.size() == 6);

  spit(tmp / "cfg.txt", "n_readers=9\nseed=4\ntau=0.2\n");
  const auto b = invoke({"simulate", "--config", tmp / "cfg.txt", "--n-readers", "6", "--out", tmp / "s.csv"});
  CHECK(b.code == 0);
  CHECK(slurp(tmp / "s.csv") == a.out);
  spit(tmp / "bad.txt", "readers=9\n");
  CHECK(invoke({"simulate", "--config", tmp / "bad.txt"}).code == 2);
  CHECK(invoke({"simulate", "--config", tmp / "absent.txt"}).code == 2);
  CHECK(invoke({"simulate", "--theta-true", "0"}).code == 2);

  const auto cov = invoke({"coverage", "--n-sims", "20", "--seed", "2", "--tau", "0.2"});
  REQUIRE(cov.code == 0);
  const auto j = nlohmann::json::parse(cov.out);
  CHECK(j["n_sims"] == 20);
  CHECK(invoke({"coverage", "--n-sims", "20", "--seed", "2", "--tau", "0.2", "--threads", "4"}).out == cov.out);
}
