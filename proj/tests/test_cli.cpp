// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the lic binary as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "lic/bytes.hpp"
#include "lic/io/image.hpp"
#include "oracles/lcg_images.hpp"

namespace fs = std::filesystem;
using namespace lic;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("lic_test_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  // Constructed after dir, so destroyed before it.
  static const struct Cleanup {
    ~Cleanup() { fs::remove_all(dir); }
  } cleanup;
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

Run run(const std::string& args, const std::string& env = "") {
  const std::string err_file = path("stderr.txt");
  const std::string cmd = env + (env.empty() ? "" : " ") + LIC_BINARY + std::string(" ") + args +
                          " 2>" + err_file;
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  const auto eb = read_file(err_file);
  r.err.assign(eb.begin(), eb.end());
  return r;
}

std::map<std::string, std::string> key_values(const std::string& s) {
  std::map<std::string, std::string> kv;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void save(const std::string& name, const nn::Tensor& t) { io::write_image(path(name), io::from_tensor(t)); }

std::vector<std::uint8_t> bytes_of(const std::string& name) { return read_file(path(name)); }

// Models and images shared by several cases.
void ensure_fixtures() {
  static bool done = false;
  if (done) return;
  REQUIRE(run("gen-fixture --cfg 1 --N 16 --seed 3 --latent-gain 4 --out " + path("m16.licm")).status == 0);
  REQUIRE(run("gen-fixture --cfg 1 --N 16 --cy 12 --seed 3 --out " + path("m16_cy12.licm")).status == 0);
  REQUIRE(run("gen-fixture --cfg 2 --N 16 --seed 3 --out " + path("m16_cfg2.licm")).status == 0);
  save("big.png", oracle::pattern_image(11, 768, 512));
  save("small.png", oracle::pattern_image(12, 200, 176));
  save("small2.ppm", oracle::perturb(oracle::pattern_image(12, 200, 176), 20, 3));
  done = true;
}

}  // namespace

TEST_CASE("gen-fixture --cfg 3 --N 128 gives decoder width 96") {
  const Run r = run("gen-fixture --cfg 3 --N 128 --cy 16 --cz 16 --out " + path("c3.licm"));
  REQUIRE(r.status == 0);
  auto kv = key_values(r.out);
  CHECK(kv["decoder_width"] == "96");
  CHECK(kv["N"] == "128");
  const Run info = run("model-info --model " + path("c3.licm") + " --json " + path("c3.json"));
  REQUIRE(info.status == 0);
  CHECK(key_values(info.out)["decoder_width"] == "96");
  const auto j = nlohmann::json::parse(read_file(path("c3.json")));
  CHECK(j["decoder_width"] == 96);
  CHECK(j["cfg"] == 3);

  // Same seed, same bytes.
  REQUIRE(run("gen-fixture --cfg 3 --N 128 --cy 16 --cz 16 --out " + path("c3b.licm")).status == 0);
  CHECK(bytes_of("c3.licm") == bytes_of("c3b.licm"));
}

TEST_CASE("encode then decode a 768x512 image; serial and two-pass agree") {
  ensure_fixtures();
  const std::string m = " --model " + path("m16.licm");
  const Run e = run("encode" + m + " --input " + path("big.png") + " --output " + path("big.lic"));
  REQUIRE(e.status == 0);
  auto ekv = key_values(e.out);
  CHECK(std::stod(ekv["bpp"]) > 0);
  CHECK(std::stod(ekv["bytes"]) == static_cast<double>(bytes_of("big.lic").size()));
  CHECK(ekv.count("time.total_ms") == 1);

  const Run d = run("decode" + m + " --input " + path("big.lic") + " --output " + path("big_tp.png") +
                    " --mode twopass");
  REQUIRE(d.status == 0);
  const Run s = run("decode" + m + " --input " + path("big.lic") + " --output " + path("big_se.png") +
                    " --mode serial");
  REQUIRE(s.status == 0);
  const io::Image out = io::read_image(path("big_tp.png"));
  CHECK(out.width == 768);
  CHECK(out.height == 512);
  CHECK(bytes_of("big_tp.png") == bytes_of("big_se.png"));
  CHECK(key_values(d.out)["decoded_symbols"] == key_values(s.out)["decoded_symbols"]);
}

TEST_CASE("threads, streams and LIC_THREADS never change output bytes") {
  ensure_fixtures();
  const std::string m = " --model " + path("m16.licm");
  const std::string in = " --input " + path("small.png");
  REQUIRE(run("encode" + m + in + " --output " + path("s1.lic") + " --threads 1").status == 0);
  REQUIRE(run("encode" + m + in + " --output " + path("s4.lic") + " --threads 4").status == 0);
  REQUIRE(run("encode" + m + in + " --output " + path("s_env.lic"), "LIC_THREADS=3").status == 0);
  CHECK(bytes_of("s1.lic") == bytes_of("s4.lic"));
  CHECK(bytes_of("s1.lic") == bytes_of("s_env.lic"));

  REQUIRE(run("encode" + m + in + " --output " + path("s_st4.lic") + " --streams 4").status == 0);
  const std::string dm = "decode" + m + " --input " + path("s_st4.lic");
  REQUIRE(run(dm + " --output " + path("d_a.ppm") + " --threads 1 --streams 1").status == 0);
  REQUIRE(run(dm + " --output " + path("d_b.ppm") + " --threads 4 --streams 4").status == 0);
  REQUIRE(run(dm + " --output " + path("d_c.ppm") + " --mode serial --threads 2").status == 0);
  REQUIRE(run("decode" + m + " --input " + path("s1.lic") + " --output " + path("d_d.ppm")).status == 0);
  CHECK(bytes_of("d_a.ppm") == bytes_of("d_b.ppm"));
  CHECK(bytes_of("d_a.ppm") == bytes_of("d_c.ppm"));
  // Stream count is a bitstream property; the reconstruction does not depend on it.
  CHECK(bytes_of("d_a.ppm") == bytes_of("d_d.ppm"));
}

TEST_CASE("decoding with the wrong model reports MODEL_MISMATCH") {
  ensure_fixtures();
  REQUIRE(run("encode --model " + path("m16.licm") + " --input " + path("small.png") + " --output " +
              path("mm.lic"))
              .status == 0);
  for (const char* other : {"m16_cy12.licm", "m16_cfg2.licm"}) {
    const Run r = run("decode --model " + path(other) + " --input " + path("mm.lic") + " --output " +
                      path("mm.png"));
    CHECK(r.status != 0);
    CHECK(r.err.rfind("error: MODEL_MISMATCH:", 0) == 0);
  }
}

TEST_CASE("error classes on bad input") {
  ensure_fixtures();
  const std::string m = " --model " + path("m16.licm");
  Run r = run("encode" + m + " --input " + path("nope.png") + " --output " + path("x.lic"));
  CHECK(r.status != 0);
  CHECK(r.err.rfind("error: IO_ERROR:", 0) == 0);

  const std::string ppm16 = "P6\n2 2\n65535\n" + std::string(24, '\x01');
  write_file(path("deep.ppm"), {reinterpret_cast<const std::uint8_t*>(ppm16.data()), ppm16.size()});
  r = run("encode" + m + " --input " + path("deep.ppm") + " --output " + path("x.lic"));
  CHECK(r.status != 0);
  CHECK(r.err.rfind("error: UNSUPPORTED:", 0) == 0);

  auto lic = bytes_of("mm.lic");
  lic.resize(lic.size() - 7);
  write_file(path("cut.lic"), lic);
  r = run("decode" + m + " --input " + path("cut.lic") + " --output " + path("x.png"));
  CHECK(r.status != 0);
  CHECK(r.err.rfind("error: TRUNCATED:", 0) == 0);

  r = run("decode" + m + " --input " + path("mm.lic") + " --output " + path("x.png") + " --mode fast");
  CHECK(r.status == 2);
  CHECK(r.err.rfind("error: INVALID_ARGUMENT:", 0) == 0);

  r = run("");
  CHECK(r.status != 0);
}

TEST_CASE("metrics: self comparison hits the caps") {
  ensure_fixtures();
  const Run r = run("metrics --ref " + path("small.png") + " --test " + path("small.png") + " --json " +
                    path("met.json"));
  REQUIRE(r.status == 0);
  auto kv = key_values(r.out);
  CHECK(kv["psnr"] == "100");
  CHECK(kv["ms_ssim"] == "1");
  CHECK(kv["mse"] == "0");
  const auto j = nlohmann::json::parse(read_file(path("met.json")));
  CHECK(j["psnr"] == 100.0);
  CHECK(j["ms_ssim"] == 1.0);

  const Run d = run("metrics --ref " + path("small.png") + " --test " + path("small2.ppm"));
  REQUIRE(d.status == 0);
  kv = key_values(d.out);
  CHECK(std::stod(kv["psnr"]) < 100);
  CHECK(std::stod(kv["ms_ssim"]) < 1);
}

TEST_CASE("roundtrip on 50 fuzzed images passes") {
  ensure_fixtures();
  const Run r = run("roundtrip --model " + path("m16.licm") + " --fuzz 50 --size 40 --seed 9 --streams 2 --json " +
                    path("rt.json"));
  CHECK(r.status == 0);
  CHECK(r.out.find("PASS 50/50 images") != std::string::npos);
  const auto j = nlohmann::json::parse(read_file(path("rt.json")));
  CHECK(j["result"] == "PASS");
  CHECK(j["failures"] == 0);
}

TEST_CASE("inspect prints the summary and the JSON report") {
  ensure_fixtures();
  REQUIRE(run("encode --model " + path("m16.licm") + " --input " + path("small.png") + " --output " +
              path("in.lic") + " --streams 2")
              .status == 0);
  const Run r = run("inspect --input " + path("in.lic") + " --json " + path("in.json"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("image: 200x176 (padded 256x192)") != std::string::npos);
  CHECK(r.out.find("segment anchor.1") != std::string::npos);
  const auto j = nlohmann::json::parse(read_file(path("in.json")));
  CHECK(j["true_width"] == 200);
  CHECK(j["padded_height"] == 192);
  CHECK(j["streams"] == 2);
  CHECK(j["segments"].size() == 5);
  CHECK(j["total_bytes"] == bytes_of("in.lic").size());
  std::size_t seg_total = j["header_bytes"];
  for (const auto& s : j["segments"]) seg_total += s["bytes"].get<std::size_t>();
  CHECK(seg_total == j["total_bytes"]);
}

TEST_CASE("bench and eval-loss") {
  ensure_fixtures();
  const std::string m = " --model " + path("m16.licm");
  Run r = run("bench" + m + " --input " + path("small.png") + " --repeat 3");
  REQUIRE(r.status == 0);
  auto kv = key_values(r.out);
  CHECK(kv["repeat"] == "3");
  CHECK(kv["modes_agree"] == "1");
  CHECK(kv.count("decode.time.theta2_ms") == 1);

  r = run("eval-loss" + m + " --input " + path("small.png") + " --lambda1 0.0483 --lambda2 0.001 --student " +
          path("m16.licm") + " --json " + path("loss.json"));
  REQUIRE(r.status == 0);
  kv = key_values(r.out);
  const auto j = nlohmann::json::parse(read_file(path("loss.json")));
  const double expect = 0.0483 * j["D"].get<double>() + j["H_y"].get<double>() + j["H_z"].get<double>() +
                        0.001 * j["L1"].get<double>();
  CHECK(j["L_T"].get<double>() == doctest::Approx(expect).epsilon(1e-9));
  CHECK(j["L_KD"] == 0.0);
  CHECK(j["L_S"] == j["L_T"]);

  r = run("eval-loss" + m + " --input " + path("small.png") + " --student " + path("m16_cy12.licm"));
  CHECK(r.status != 0);
  CHECK(r.err.rfind("error: SHAPE_MISMATCH:", 0) == 0);

  r = run("eval-loss" + m + " --input " + path("small.png") + " --lambda1 -1");
  CHECK(r.status == 2);
}
