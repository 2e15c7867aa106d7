// wildnet command-line front end: pipeline simulation, SDSM codec,
// detection evaluation, and a UDP alert listener.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wildnet/error.hpp"
#include "wildnet/eval.hpp"
#include "wildnet/scenario.hpp"
#include "wildnet/sdsm.hpp"
#include "wildnet/udp.hpp"

namespace {

using namespace wildnet;

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError("write failed: " + path.string());
}

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 const std::string& obu_endpoint, const std::string& out_path,
                 const std::string& format, bool measure, bool no_udp,
                 std::optional<double> driver_conf, std::optional<double> broadcast_conf,
                 std::optional<int> confirm_frames, bool hot_weather) {
  Scenario scenario = load_scenario(scenario_path);
  if (driver_conf) scenario.thresholds.driver_warn_conf = *driver_conf;
  if (broadcast_conf) scenario.thresholds.broadcast_conf = *broadcast_conf;
  if (confirm_frames) scenario.thresholds.confirm_frames = *confirm_frames;
  if (hot_weather) scenario.thresholds.hot_weather_mode = true;
  scenario.thresholds.validate();

  SimOptions options;
  options.seed_override = seed;
  options.measure = measure;
  options.udp_enabled = !no_udp;
  if (!obu_endpoint.empty()) options.obu_endpoint_override = Endpoint::parse(obu_endpoint);

  const SimReport report = run(scenario, options);

  const std::string json_text = report_to_json(report).dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw ParseError("cannot open report file for writing: " + out_path);
    out << json_text;
  } else if (format == "json") {
    std::cout << json_text;
  } else {
    std::cout << render_summary(report);
  }
  std::cerr << render_summary(report);

  if (!report.complete) {
    std::cerr << "error: run aborted: " << report.abort_reason << "\n";
    return 1;
  }
  return report.violations.empty() ? 0 : 2;
}

int cmd_codec(const std::string& action, const std::string& in_path,
              const std::string& out_path) {
  if (action == "encode") {
    std::ifstream in(in_path);
    if (!in) throw ParseError("cannot open file: " + in_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(in_path + ": " + e.what());
    }
    const auto bytes = encode(sdsm_from_json(j));
    const std::string out =
        out_path.empty() ? std::filesystem::path(in_path).replace_extension(".bin").string()
                         : out_path;
    write_binary(out, bytes);
    std::cerr << "encoded " << bytes.size() << " bytes -> " << out << "\n";
    return 0;
  }
  if (action == "decode") {
    const auto bytes = read_binary(in_path);
    const auto msg = decode(bytes);
    const std::string text = sdsm_to_json(msg).dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::trunc);
      if (!out) throw ParseError("cannot open file for writing: " + out_path);
      out << text;
    }
    return 0;
  }
  if (action == "dump") {
    const auto bytes = read_binary(in_path);
    std::cout << dump_annotated(bytes);
    return 0;
  }
  std::cerr << "error: codec action must be encode, decode, or dump\n";
  return 1;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path, double conf_thresh,
             bool table, bool bins, const std::string& format) {
  const GroundTruthSet gts = load_ground_truth(gt_path);
  const PredictionSet preds = load_predictions(pred_path);
  if (gts.total_boxes() == 0) throw EvalError("zero ground-truth boxes in " + gt_path);

  const EvalReport report = evaluate(preds, gts, conf_thresh);
  const bool text_mode = table || bins || format == "text";
  if (text_mode) {
    if (table || !bins) std::cout << render_metrics_table(report);
    if (bins) {
      if (report.range_bins.empty())
        throw EvalError("--bins requires est_distance_ft on every ground truth");
      std::cout << render_range_table(report);
    }
  } else {
    std::cout << eval_report_to_json(report).dump(2) << "\n";
  }
  return 0;
}

std::atomic<bool> g_interrupted{false};

void on_interrupt(int) { g_interrupted = true; }

int cmd_listen(std::uint16_t port, std::uint64_t count, int timeout_ms) {
  UdpReceiver receiver(port);
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  std::cerr << "listening on udp port " << receiver.port() << "\n";

  std::uint64_t seen = 0;
  const auto started = std::chrono::steady_clock::now();
  while (!g_interrupted) {
    if (timeout_ms > 0) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - started)
                               .count();
      if (elapsed >= timeout_ms) break;
    }
    const auto datagram = receiver.recv(200);
    if (!datagram) continue;
    const auto recv_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
    try {
      const auto msg = decode(datagram->payload);
      nlohmann::ordered_json line;
      line["recv_ms"] = recv_ms;
      line["from"] = datagram->from;
      line["msg"] = sdsm_to_json(msg);
      std::cout << line.dump() << "\n" << std::flush;
      if (count > 0 && ++seen >= count) break;
    } catch (const CodecError& e) {
      std::cerr << "warning: dropped malformed datagram from " << datagram->from << ": "
                << e.what() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermal detection to V2X alert pipeline tools"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string obu_endpoint;
  std::string out_path;
  std::string sim_format = "json";
  bool measure = false;
  bool no_udp = false;
  std::optional<double> driver_conf;
  std::optional<double> broadcast_conf;
  std::optional<int> confirm_frames;
  bool hot_weather = false;
  auto* simulate = app.add_subcommand("simulate", "run a scenario end to end");
  simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--seed", seed, "override the scenario RNG seed");
  simulate->add_option("--obu-endpoint", obu_endpoint, "host:port for the UDP OBU leg")
      ->envname("WILDNET_OBU_ENDPOINT");
  simulate->add_option("--out", out_path, "write the JSON report here instead of stdout");
  simulate->add_option("--format", sim_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  simulate->add_flag("--measure", measure,
                     "report wall-clock capture/sdsm stages (breaks byte determinism)");
  simulate->add_flag("--no-udp", no_udp, "skip the real UDP leg");
  simulate->add_option("--driver-conf", driver_conf, "driver warning confidence threshold");
  simulate->add_option("--broadcast-conf", broadcast_conf, "broadcast confidence threshold");
  simulate->add_option("--confirm-frames", confirm_frames, "consecutive frames to confirm");
  simulate->add_flag("--hot-weather", hot_weather, "raise the driver threshold to >=0.65");

  // codec
  std::string codec_action;
  std::string codec_in;
  std::string codec_out;
  auto* codec = app.add_subcommand("codec", "encode/decode/dump SDSM buffers");
  codec->add_option("action", codec_action, "encode|decode|dump")->required();
  codec->add_option("path", codec_in, "input file")->required();
  codec->add_option("-o,--out", codec_out, "output file");

  // eval
  std::string gt_path;
  std::string pred_path;
  double conf_thresh = 0.0;
  bool table = false;
  bool bins = false;
  std::string eval_format = "json";
  auto* eval_cmd = app.add_subcommand("eval", "detection metrics from gt + prediction files");
  eval_cmd->add_option("ground_truth", gt_path, "ground truth JSONL")->required();
  eval_cmd->add_option("predictions", pred_path, "predictions JSONL (or replay log)")->required();
  eval_cmd->add_option("--conf", conf_thresh, "confidence threshold for P/R/confusion");
  eval_cmd->add_flag("--table", table, "render a metrics text table");
  eval_cmd->add_flag("--bins", bins, "render range-binned accuracy");
  eval_cmd->add_option("--format", eval_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));

  // listen
  std::uint16_t port = kDefaultObuPort;
  std::uint64_t count = 0;
  int timeout_ms = 0;
  auto* listen = app.add_subcommand("listen", "decode SDSM datagrams from a UDP port");
  listen->add_option("--port", port, "UDP port to bind");
  listen->add_option("--count", count, "exit after this many decoded messages");
  listen->add_option("--timeout-ms", timeout_ms, "exit after this much time");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(scenario_path, seed, obu_endpoint, out_path, sim_format, measure,
                          no_udp, driver_conf, broadcast_conf, confirm_frames, hot_weather);
    if (codec->parsed()) return cmd_codec(codec_action, codec_in, codec_out);
    if (eval_cmd->parsed())
      return cmd_eval(gt_path, pred_path, conf_thresh, table, bins, eval_format);
    if (listen->parsed()) return cmd_listen(port, count, timeout_ms);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
