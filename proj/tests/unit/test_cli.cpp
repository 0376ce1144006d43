// Copyright 2026 The nearfield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// stdout of the CLI; stderr is discarded.
Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + NEARFIELD_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

const std::string kDir = NEARFIELD_SCENARIO_DIR;

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("sweep") {
  const Run r = run("sweep --config " + kDir + "/table2_desk.json --trials 2 --snr-db 0,10 --seed 7");
  CHECK(r.status == 0);
  CHECK(first_line(r.out).rfind(
            "snr_db,trial,bs,nmse_db,theta_rmse,r_rmse,single_rmse_m,fused_rmse_m,step3_nmse_db",
            0) == 0);
  CHECK(lines(r.out) == 1 + 2 * 2 * 4);
  CHECK(run("sweep --config " + kDir + "/table2_desk.json --trials 2 --snr-db 0,10 --seed 7 --threads 2")
            .out == r.out);
}

TEST_CASE("crlb") {
  const Run r = run("crlb --config " + kDir + "/single_path.json");
  CHECK(r.status == 0);
  CHECK(first_line(r.out) == "param,crlb,sqrt_crlb");
  CHECK(lines(r.out) == 5);
  CHECK(r.out.find("\ng,") != std::string::npos);
}

TEST_CASE("estimate") {
  const Run r = run("estimate --config " + kDir + "/single_path.json");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("result").contains("step2"));
  CHECK(j.contains("truth"));
}

TEST_CASE("codebook and validate") {
  const Run c = run("codebook --config " + kDir + "/single_path.json");
  CHECK(c.status == 0);
  CHECK(first_line(c.out) == "index,n_theta,n_r,theta,r,cos_theta");
  CHECK(run("validate --config " + kDir + "/single_path.json").status == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("sweep --config /nonexistent/x.json").status == 2);
  CHECK(run("frobnicate").status == 1);
  CHECK(run("sweep").status == 1);
  CHECK(run("sweep --config " + kDir + "/single_path.json --trials zero").status == 1);
}

TEST_CASE("missing config names the path") {
  const std::string cmd = std::string("\"") + NEARFIELD_CLI +
                          "\" crlb --config /nonexistent/x.json 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::string err;
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) err.append(buf.data(), n);
  pclose(p);
  CHECK(err.find("/nonexistent/x.json") != std::string::npos);
}
