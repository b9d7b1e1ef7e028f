// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

// lic: command-line front end for the codec library.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lic/bitstream/container.hpp"
#include "lic/bytes.hpp"
#include "lic/codec/checkerboard.hpp"
#include "lic/error.hpp"
#include "lic/io/image.hpp"
#include "lic/metrics/metrics.hpp"
#include "lic/nn/model.hpp"
#include "lic/parallel.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace lic;

using KeyValues = std::vector<std::pair<std::string, double>>;

void print_kv(const KeyValues& kv) { std::cout << metrics::format_key_values(kv); }

json kv_json(const KeyValues& kv) {
  json j = json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  const std::string s = j.dump(2) + "\n";
  write_file(path, {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

void add_timings(KeyValues& kv, const codec::StageTimings& t) {
  kv.emplace_back("time.analysis_ms", t.analysis * 1e3);
  kv.emplace_back("time.hyper_synthesis_ms", t.hyper_synthesis * 1e3);
  kv.emplace_back("time.z_coding_ms", t.z_coding * 1e3);
  kv.emplace_back("time.theta1_ms", t.theta1 * 1e3);
  kv.emplace_back("time.anchor_coding_ms", t.anchor_coding * 1e3);
  kv.emplace_back("time.theta2_ms", t.theta2 * 1e3);
  kv.emplace_back("time.nonanchor_coding_ms", t.nonanchor_coding * 1e3);
  kv.emplace_back("time.synthesis_ms", t.synthesis * 1e3);
  kv.emplace_back("time.total_ms", t.total * 1e3);
}

codec::DecodeMode parse_mode(const std::string& m) {
  if (m == "twopass") return codec::DecodeMode::kTwoPass;
  if (m == "serial") return codec::DecodeMode::kSerial;
  throw Error(ErrorCode::kInvalidArgument, "mode must be twopass or serial");
}

struct Common {
  std::string model;
  int threads = default_thread_count();
  std::string json_path;
};

std::unique_ptr<ThreadPool> make_pool(int threads) {
  if (threads < 1) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
  return std::make_unique<ThreadPool>(threads);
}

nn::Model load(const std::string& path) { return nn::Model(nn::load_model_file(path)); }

double sum(const std::vector<double>& v, std::size_t b, std::size_t e) {
  double s = 0;
  for (std::size_t i = b; i < e; ++i) s += v[i];
  return s;
}

nn::Tensor random_image(std::mt19937_64& rng, int width, int height) {
  nn::Tensor t(3, height, width);
  for (float& v : t.values()) {
    v = static_cast<float>(static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
  // 8-bit grid, as if read from a file.
  return io::to_tensor(io::from_tensor(t));
}

int cmd_encode(const Common& c, const std::string& input, const std::string& output,
               int streams, bool no_skip) {
  const nn::Model model = load(c.model);
  auto pool = make_pool(c.threads);
  const nn::Tensor x = io::to_tensor(io::read_image(input));
  codec::EncodeOptions opt;
  opt.pool = pool.get();
  opt.streams = streams;
  opt.skip_zero_channels = !no_skip;
  const auto r = codec::encode_image(x, model, opt);
  write_file(output, r.bytes);
  const auto s = bitstream::summarize(r.container, r.bytes.size());
  KeyValues kv = {{"bytes", static_cast<double>(r.bytes.size())},
                  {"bpp", s.bpp},
                  {"skipped_channels", static_cast<double>(s.skipped_channels)},
                  {"latent_channels", static_cast<double>(s.latent_channels)}};
  add_timings(kv, r.timings);
  print_kv(kv);
  write_json(c.json_path, kv_json(kv));
  return 0;
}

int cmd_decode(const Common& c, const std::string& input, const std::string& output,
               int streams, const std::string& mode) {
  const nn::Model model = load(c.model);
  auto pool = make_pool(c.threads);
  codec::DecodeOptions opt;
  opt.pool = pool.get();
  opt.mode = parse_mode(mode);
  opt.max_parallel_segments = streams;
  const auto bytes = read_file(input);
  const auto r = codec::decode_image(bytes, model, opt);
  io::write_image(output, io::from_tensor(r.image));
  KeyValues kv = {{"width", static_cast<double>(r.image.width())},
                  {"height", static_cast<double>(r.image.height())},
                  {"decoded_symbols", static_cast<double>(r.decoded_symbols)}};
  add_timings(kv, r.timings);
  print_kv(kv);
  write_json(c.json_path, kv_json(kv));
  return 0;
}

// Encode, then decode two-pass and serial; every latent must match.
int cmd_roundtrip(const Common& c, const std::string& input, int streams, int fuzz,
                  int size, std::uint64_t seed) {
  const nn::Model model = load(c.model);
  auto pool = make_pool(c.threads);
  std::vector<nn::Tensor> images;
  if (!input.empty()) images.push_back(io::to_tensor(io::read_image(input)));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < fuzz; ++i) {
    const int w = size - static_cast<int>(rng() % 17);
    const int h = size - static_cast<int>(rng() % 17);
    images.push_back(random_image(rng, std::max(w, 1), std::max(h, 1)));
  }
  if (images.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "roundtrip needs --input or --fuzz");
  }
  int failures = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    codec::EncodeOptions eo;
    eo.pool = pool.get();
    eo.streams = streams;
    const auto enc = codec::encode_image(images[i], model, eo);
    codec::DecodeOptions two;
    two.pool = pool.get();
    const auto d2 = codec::decode_image(enc.bytes, model, two);
    codec::DecodeOptions ser = two;
    ser.mode = codec::DecodeMode::kSerial;
    const auto ds = codec::decode_latents(bitstream::parse_container(enc.bytes), model, ser);
    std::string stage;
    if (!(d2.z_hat == enc.z_hat)) stage = "z_hat (two-pass)";
    else if (!(d2.y_hat == enc.y_hat)) stage = "y_hat (two-pass)";
    else if (!(ds.y_hat == enc.y_hat)) stage = "y_hat (serial)";
    else if (!(ds.z_hat == enc.z_hat)) stage = "z_hat (serial)";
    if (!stage.empty()) {
      ++failures;
      std::cout << "image " << i << ": FAIL at " << stage << "\n";
    }
  }
  std::cout << (failures ? "FAIL" : "PASS") << " " << images.size() - failures << "/"
            << images.size() << " images\n";
  write_json(c.json_path, json{{"images", images.size()},
                               {"failures", failures},
                               {"result", failures ? "FAIL" : "PASS"}});
  if (failures) {
    throw Error(ErrorCode::kAssertion,
                "roundtrip: " + std::to_string(failures) + " image(s) failed");
  }
  return 0;
}

int cmd_bench(const Common& c, const std::string& input, int repeat, int streams,
              const std::string& mode) {
  const nn::Model model = load(c.model);
  auto pool = make_pool(c.threads);
  const nn::Tensor x = io::to_tensor(io::read_image(input));
  codec::EncodeOptions eo;
  eo.pool = pool.get();
  eo.streams = streams;
  std::vector<codec::StageTimings> enc_runs;
  codec::EncodeResult enc;
  for (int i = 0; i < repeat; ++i) {
    enc = codec::encode_image(x, model, eo);
    enc_runs.push_back(enc.timings);
  }
  const auto report = codec::decode_bench(enc.container, model, parse_mode(mode),
                                          pool.get(), repeat);
  KeyValues kv = {{"repeat", static_cast<double>(repeat)},
                  {"threads", static_cast<double>(c.threads)},
                  {"streams", static_cast<double>(streams)},
                  {"bytes", static_cast<double>(enc.bytes.size())},
                  {"modes_agree", report.modes_agree ? 1.0 : 0.0}};
  KeyValues ekv;
  add_timings(ekv, codec::median_timings(enc_runs));
  for (auto& [k, v] : ekv) kv.emplace_back("encode." + k, v);
  KeyValues dkv;
  add_timings(dkv, report.median);
  for (auto& [k, v] : dkv) kv.emplace_back("decode." + k, v);
  print_kv(kv);
  write_json(c.json_path, kv_json(kv));
  return 0;
}

int cmd_metrics(const std::string& ref, const std::string& test,
                const std::string& json_path) {
  const nn::Tensor a = io::to_tensor(io::read_image(ref));
  const nn::Tensor b = io::to_tensor(io::read_image(test));
  KeyValues kv = {{"mse", metrics::mse(a, b)}, {"psnr", metrics::psnr(a, b)}};
  if (std::min(a.height(), a.width()) >= metrics::kMsSsimMinSize) {
    kv.emplace_back("ms_ssim", metrics::ms_ssim(a, b));
  }
  print_kv(kv);
  write_json(json_path, kv_json(kv));
  return 0;
}

int cmd_eval_loss(const Common& c, const std::string& input,
                  const std::string& student_path, const metrics::LossConfig& cfg) {
  cfg.validate();
  const nn::Model model = load(c.model);
  auto pool = make_pool(c.threads);
  const nn::Tensor x = io::to_tensor(io::read_image(input));
  codec::EncodeOptions eo;
  eo.pool = pool.get();
  const auto enc = codec::encode_image(x, model, eo);
  const auto& bits = enc.estimated_bits;
  const double h_z = bits[0];
  const double h_y = sum(bits, 1, bits.size());
  const nn::Tensor x_hat = codec::synthesize(model, enc.y_hat, enc.container.true_width,
                                             enc.container.true_height, pool.get());
  metrics::LossReport r = metrics::teacher_loss(x, x_hat, h_y, h_z, enc.y_hat, cfg);
  if (!student_path.empty()) {
    const nn::Model student = load(student_path);
    // Both networks see the teacher's latents.
    auto thetas = [&](const nn::Model& m) {
      const nn::Tensor t1 = nn::run_graph(m.graphs().hyper_synthesis, m.weights(),
                                          nn::dequantize(enc.z_hat),
                                          m.run_options(pool.get()));
      const auto mask = codec::make_masks(enc.y_hat.height, enc.y_hat.width);
      const nn::Tensor t3 = codec::masked_context_conv(
          m, nn::dequantize(codec::split(enc.y_hat, mask).first), pool.get());
      return std::pair{codec::compute_theta1(m, t1, pool.get()),
                       codec::compute_theta2(m, t1, t3, pool.get())};
    };
    const auto [t1_t, t2_t] = thetas(model);
    if (student.arch().latent_channels != model.arch().latent_channels ||
        student.arch().hyper_channels != model.arch().hyper_channels) {
      throw Error(ErrorCode::kShape,
                  "student latent widths differ from the teacher; the KD "
                  "distance on parameters is undefined without a projection");
    }
    const auto [t1_s, t2_s] = thetas(student);
    const nn::Tensor xs = codec::synthesize(student, enc.y_hat, enc.container.true_width,
                                            enc.container.true_height, pool.get());
    r.kd = metrics::kd_loss(x_hat, xs, t1_t, t1_s, t2_t, t2_s);
    r.student = r.teacher + cfg.lambda3 * r.kd;
  }
  KeyValues kv = {{"D", r.distortion}, {"H_y", r.h_y_bits}, {"H_z", r.h_z_bits},
                  {"L1", r.l1},        {"L_T", r.teacher},  {"L_KD", r.kd},
                  {"L_S", r.student},  {"bpp", r.bpp}};
  print_kv(kv);
  write_json(c.json_path, kv_json(kv));
  return 0;
}

int cmd_gen_fixture(int cfg, int n, int cy, int cz, std::uint64_t seed, float gain,
                    const std::string& out) {
  nn::FixtureOptions fo;
  fo.seed = seed;
  fo.arch = {cfg, n, cy > 0 ? cy : n, cz > 0 ? cz : n};
  fo.latent_gain = gain;
  const nn::ModelFile m = nn::gen_fixture(fo);
  nn::save_model_file(out, m);
  const auto graphs = nn::build_config(m.arch);
  print_kv({{"cfg", static_cast<double>(m.arch.cfg)},
            {"N", static_cast<double>(m.arch.width)},
            {"C_y", static_cast<double>(m.arch.latent_channels)},
            {"C_z", static_cast<double>(m.arch.hyper_channels)},
            {"decoder_width", static_cast<double>(m.arch.decoder_width())},
            {"parameters", static_cast<double>(nn::parameter_report(graphs).total)}});
  return 0;
}

int cmd_inspect(const std::string& input, const std::string& json_path) {
  const auto bytes = read_file(input);
  const auto s = bitstream::inspect(bytes);
  std::cout << bitstream::format_summary(s);
  json segs = json::array();
  for (const auto& seg : s.segments) {
    segs.push_back({{"name", seg.name}, {"bytes", seg.bytes}, {"symbols", seg.symbols}});
  }
  write_json(json_path, json{{"true_width", s.true_width},
                             {"true_height", s.true_height},
                             {"padded_width", s.padded_width},
                             {"padded_height", s.padded_height},
                             {"cfg", s.cfg},
                             {"N", s.width_n},
                             {"C_y", s.latent_channels},
                             {"C_z", s.hyper_channels},
                             {"streams", s.streams},
                             {"present_channels", s.present_channels},
                             {"skipped_channels", s.skipped_channels},
                             {"header_bytes", s.header_bytes},
                             {"total_bytes", s.total_bytes},
                             {"bpp", s.bpp},
                             {"segments", segs}});
  return 0;
}

int cmd_model_info(const std::string& path, const std::string& json_path) {
  const nn::Model model = load(path);
  const auto r = nn::parameter_report(model.graphs());
  const auto& a = model.arch();
  KeyValues kv = {{"cfg", static_cast<double>(a.cfg)},
                  {"N", static_cast<double>(a.width)},
                  {"C_y", static_cast<double>(a.latent_channels)},
                  {"C_z", static_cast<double>(a.hyper_channels)},
                  {"decoder_width", static_cast<double>(a.decoder_width())},
                  {"leaky_relu_slope", model.leaky_slope()},
                  {"params.g_a", static_cast<double>(r.analysis)},
                  {"params.g_s", static_cast<double>(r.synthesis)},
                  {"params.h_a", static_cast<double>(r.hyper_analysis)},
                  {"params.h_s", static_cast<double>(r.hyper_synthesis)},
                  {"params.context", static_cast<double>(r.context)},
                  {"params.pen1", static_cast<double>(r.pen1)},
                  {"params.pen2", static_cast<double>(r.pen2)},
                  {"params.total", static_cast<double>(r.total)}};
  print_kv(kv);
  write_json(json_path, kv_json(kv));
  return 0;
}

void add_common(CLI::App* app, Common& c, bool with_model = true) {
  if (with_model) app->add_option("--model", c.model, "model file (.licm)")->required();
  app->add_option("--threads", c.threads, "worker threads (default: LIC_THREADS or 1)");
  app->add_option("--json", c.json_path, "write a JSON report to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lic: learned image codec with a checkerboard context model"};
  app.require_subcommand(1);
  Common common;
  std::string input, output, mode = "twopass", ref, test, student;
  int streams = 1, repeat = 5, fuzz = 0, size = 64;
  std::uint64_t seed = 0;
  bool no_skip = false;
  int cfg = 1, n = 128, cy = 0, cz = 0;
  float gain = 1.0f;
  metrics::LossConfig loss;
  std::string distortion = "mse";

  auto* enc = app.add_subcommand("encode", "compress an image");
  add_common(enc, common);
  enc->add_option("--input", input, "PNG or PPM image")->required();
  enc->add_option("--output", output, "output .lic")->required();
  enc->add_option("--streams", streams, "entropy-coded streams per pass")->check(CLI::Range(1, 64));
  enc->add_flag("--no-skip", no_skip, "code all-zero channels instead of skipping them");

  auto* dec = app.add_subcommand("decode", "decompress a .lic file");
  add_common(dec, common);
  dec->add_option("--input", input, "input .lic")->required();
  dec->add_option("--output", output, "output image (.png or .ppm)")->required();
  dec->add_option("--streams", streams, "max segments decoded concurrently")->check(CLI::Range(1, 64));
  dec->add_option("--mode", mode, "twopass or serial")->check(CLI::IsMember({"twopass", "serial"}));

  auto* rt = app.add_subcommand("roundtrip", "encode + decode and verify latents");
  add_common(rt, common);
  rt->add_option("--input", input, "image to verify");
  rt->add_option("--streams", streams)->check(CLI::Range(1, 64));
  rt->add_option("--fuzz", fuzz, "number of random images to add");
  rt->add_option("--size", size, "random image side (each side jittered by up to -16)")->check(CLI::Range(17, 4096));
  rt->add_option("--seed", seed, "random image seed");

  auto* bench = app.add_subcommand("bench", "median per-stage timings");
  add_common(bench, common);
  bench->add_option("--input", input)->required();
  bench->add_option("--repeat", repeat)->check(CLI::Range(1, 1000));
  bench->add_option("--streams", streams)->check(CLI::Range(1, 64));
  bench->add_option("--mode", mode)->check(CLI::IsMember({"twopass", "serial"}));

  auto* met = app.add_subcommand("metrics", "PSNR and MS-SSIM of two images");
  met->add_option("--ref", ref)->required();
  met->add_option("--test", test)->required();
  met->add_option("--json", common.json_path);

  auto* ev = app.add_subcommand("eval-loss", "rate-distortion loss terms");
  add_common(ev, common);
  ev->add_option("--input", input)->required();
  ev->add_option("--lambda1", loss.lambda1)->check(CLI::NonNegativeNumber);
  ev->add_option("--lambda2", loss.lambda2)->check(CLI::NonNegativeNumber);
  ev->add_option("--lambda3", loss.lambda3)->check(CLI::NonNegativeNumber);
  ev->add_option("--distortion", distortion)->check(CLI::IsMember({"mse", "ms-ssim"}));
  ev->add_option("--student", student, "student model for the distillation term");

  auto* gen = app.add_subcommand("gen-fixture", "write a seeded stand-in model");
  gen->add_option("--cfg", cfg)->check(CLI::Range(1, 4));
  gen->add_option("--N", n)->check(CLI::Range(1, 4096));
  gen->add_option("--cy", cy, "latent channels (default N)")->check(CLI::Range(0, 2000));
  gen->add_option("--cz", cz, "hyper channels (default N)")->check(CLI::Range(0, 4096));
  gen->add_option("--seed", seed);
  gen->add_option("--latent-gain", gain, "multiplier on the last analysis conv");
  gen->add_option("--out", output)->required();

  auto* ins = app.add_subcommand("inspect", "summarize a .lic file");
  ins->add_option("--input", input)->required();
  ins->add_option("--json", common.json_path);

  auto* info = app.add_subcommand("model-info", "architecture and parameter counts");
  info->add_option("--model", common.model)->required();
  info->add_option("--json", common.json_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: INVALID_ARGUMENT: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*enc) return cmd_encode(common, input, output, streams, no_skip);
    if (*dec) return cmd_decode(common, input, output, streams, mode);
    if (*rt) return cmd_roundtrip(common, input, streams, fuzz, size, seed);
    if (*bench) return cmd_bench(common, input, repeat, streams, mode);
    if (*met) return cmd_metrics(ref, test, common.json_path);
    if (*ev) {
      loss.distortion = distortion == "mse" ? metrics::Distortion::kMse
                                            : metrics::Distortion::kMsSsim;
      return cmd_eval_loss(common, input, student, loss);
    }
    if (*gen) return cmd_gen_fixture(cfg, n, cy, cz, seed, gain, output);
    if (*ins) return cmd_inspect(input, common.json_path);
    if (*info) return cmd_model_info(common.model, common.json_path);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
