#include <poll.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "wildnet/sdsm.hpp"
#include "wildnet/udp.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kCli = WILDNET_CLI_PATH;
const fs::path kFixtures = WILDNET_FIXTURE_DIR;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cli: simulate is byte-identical across runs with the same seed") {
  const std::string args =
      "simulate " + (kFixtures / "marshill_small.json").string() + " --seed 7 --no-udp";
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(second.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(!first.out.empty());
  // single valid JSON document on stdout
  const auto parsed = nlohmann::json::parse(first.out);
  CHECK(parsed.at("broadcasts").get<int>() == 2);
}

TEST_CASE("cli: simulate exits 2 on budget violations, 1 on missing files") {
  const auto over =
      run_cli("simulate " + (kFixtures / "overbudget_small.json").string() + " --no-udp");
  CHECK(over.exit_code == 2);
  const auto missing = run_cli("simulate /nonexistent/scenario.json");
  CHECK(missing.exit_code == 1);
}

TEST_CASE("cli: codec encode/decode round-trips the fixture JSON") {
  const fs::path tmp = fs::temp_directory_path() / "wildnet_cli_codec.bin";
  const auto encode_result = run_cli("codec encode " + (kFixtures / "sdsm_deer_82.json").string() +
                                     " -o " + tmp.string());
  CHECK(encode_result.exit_code == 0);
  CHECK(fs::file_size(tmp) == 38);

  const auto decode_result = run_cli("codec decode " + tmp.string());
  CHECK(decode_result.exit_code == 0);
  const auto round_tripped = nlohmann::json::parse(decode_result.out);
  const auto original = nlohmann::json::parse(read_file(kFixtures / "sdsm_deer_82.json"));
  CHECK(round_tripped == original);
  fs::remove(tmp);
}

TEST_CASE("cli: codec dump annotates data and pad bits") {
  const fs::path tmp = fs::temp_directory_path() / "wildnet_cli_dump.bin";
  run_cli("codec encode " + (kFixtures / "sdsm_deer_82.json").string() + " -o " + tmp.string());
  const auto dump = run_cli("codec dump " + tmp.string());
  CHECK(dump.exit_code == 0);
  CHECK(dump.out.find("297 data bits") != std::string::npos);
  CHECK(dump.out.find("7 pad bits") != std::string::npos);
  fs::remove(tmp);
}

TEST_CASE("cli: codec decode of a truncated buffer fails cleanly") {
  const fs::path tmp = fs::temp_directory_path() / "wildnet_cli_trunc.bin";
  run_cli("codec encode " + (kFixtures / "sdsm_deer_82.json").string() + " -o " + tmp.string());
  fs::resize_file(tmp, 37);
  const auto result = run_cli("codec decode " + tmp.string());
  CHECK(result.exit_code == 1);
  fs::remove(tmp);
}

TEST_CASE("cli: eval emits the committed golden report byte-for-byte") {
  const auto result = run_cli("eval " + (kFixtures / "eval" / "gt.jsonl").string() + " " +
                              (kFixtures / "eval" / "pred.jsonl").string());
  CHECK(result.exit_code == 0);
  CHECK(result.out == read_file(kFixtures / "eval" / "golden_report.json"));
}

TEST_CASE("cli: eval table and bins renderings") {
  const auto table = run_cli("eval " + (kFixtures / "eval" / "gt.jsonl").string() + " " +
                             (kFixtures / "eval" / "pred.jsonl").string() + " --table");
  CHECK(table.exit_code == 0);
  CHECK(table.out.find("mAP@0.5") != std::string::npos);
  CHECK(table.out.find("F1 Score") != std::string::npos);

  const auto bins = run_cli("eval " + (kFixtures / "eval" / "gt.jsonl").string() + " " +
                            (kFixtures / "eval" / "pred.jsonl").string() + " --bins");
  CHECK(bins.exit_code == 0);
  CHECK(bins.out.find(">100 ft") != std::string::npos);
}

TEST_CASE("cli: eval rejects prediction ids missing from the ground truth") {
  const fs::path bad = fs::temp_directory_path() / "wildnet_bad_pred.jsonl";
  std::ofstream(bad) << R"({"image_id":"zzz","boxes":[{"bbox":[0,0,5,5],"conf":0.5}]})" << "\n";
  const auto result = run_cli("eval " + (kFixtures / "eval" / "gt.jsonl").string() + " " +
                              bad.string());
  CHECK(result.exit_code == 1);
  fs::remove(bad);
}

TEST_CASE("cli: listen with no traffic stays silent and exits 0") {
  const auto result = run_cli("listen --port 47711 --timeout-ms 300");
  CHECK(result.exit_code == 0);
  CHECK(result.out.empty());
}

TEST_CASE("cli: listen decodes a datagram, skipping garbage first") {
  const std::uint16_t port = 47613;
  const std::string cmd =
      kCli + " listen --port " + std::to_string(port) + " --count 1 --timeout-ms 10000 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);

  const auto payload =
      wildnet::encode(wildnet::sdsm_from_json(nlohmann::json::parse(read_file(kFixtures / "sdsm_deer_82.json"))));
  const std::vector<std::uint8_t> garbage = {0xde, 0xad};
  const wildnet::Endpoint endpoint{"127.0.0.1", port};

  // the listener needs a moment to bind; retry until its stdout has data
  pollfd pfd{fileno(pipe), POLLIN, 0};
  for (int attempt = 0; attempt < 60; ++attempt) {
    wildnet::udp_send(garbage, endpoint);
    wildnet::udp_send(payload, endpoint);
    if (poll(&pfd, 1, 250) > 0 && (pfd.revents & POLLIN)) break;
  }

  char line[4096] = {};
  REQUIRE(fgets(line, sizeof(line), pipe) != nullptr);
  const int status = pclose(pipe);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);

  const auto alert = nlohmann::json::parse(line);
  CHECK(alert.contains("recv_ms"));
  CHECK(alert.at("msg").at("objects").at(0).at("confidence_pct").get<int>() == 82);
}
