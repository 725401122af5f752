#include "doctest.h"

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/cli.hpp"
#include "json.hpp"
#include "superdiff/error.hpp"
#include "superdiff/truncation.hpp"

using namespace superdiff;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

struct Outcome {
  int code = 0;
  std::string err;
};

// Runs the CLI with stderr captured.
Outcome invoke(std::vector<std::string> args) {
  std::fflush(stderr);
  const std::string path = "cli_stderr.txt";
  const int saved = dup(fileno(stderr));
  const int fd = open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  dup2(fd, fileno(stderr));
  close(fd);
  Outcome o;
  o.code = cli::run(args);
  std::fflush(stderr);
  dup2(saved, fileno(stderr));
  close(saved);
  o.err = slurp(path);
  return o;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::path("cli_work") / name;
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lil_args(const fs::path& out) {
  return {"lil", "--nmax", "2^14", "--streams", "12", "--seed", "3", "--shards", "8", "--out", out.string()};
}

}  // namespace

TEST_CASE("count and grid parsers") {
  CHECK(cli::parse_count("2^24") == (1u << 24));
  CHECK(cli::parse_count("4096") == 4096);
  CHECK(cli::parse_count("1e6") == 1000000);
  CHECK(cli::parse_count(" 10^4 ") == 10000);
  CHECK_THROWS_AS(cli::parse_count("2^x"), Error);
  CHECK_THROWS_AS(cli::parse_count("-3"), Error);
  CHECK_THROWS_AS(cli::parse_count("1.5"), Error);
  CHECK(cli::parse_real("0.25") == 0.25);
  CHECK_THROWS_AS(cli::parse_real("abc"), Error);
  CHECK(cli::parse_count_grid("2^8..2^11") == std::vector<std::uint64_t>{256, 512, 1024, 2048});
  CHECK(cli::parse_count_grid("16,32,64") == std::vector<std::uint64_t>{16, 32, 64});
  CHECK(cli::parse_count_grid("7") == std::vector<std::uint64_t>{7});
  CHECK(cli::parse_real_grid("0.8,1.2") == std::vector<double>{0.8, 1.2});
  CHECK(cli::parse_power_rule("m^0.6") == 0.6);
  CHECK_THROWS_AS(cli::parse_power_rule("R^0.6"), Error);
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"blocks", "--n", "8", "--out", fresh("blocks").string()}).code == cli::kExitOk);
  const auto bad = invoke({"lil", "--nmax", "2^x", "--out", fresh("x").string()});
  CHECK(bad.code == cli::kExitValidation);
  CHECK(bad.err.find("--nmax") != std::string::npos);
  CHECK(invoke({"frobnicate"}).code == cli::kExitValidation);
  CHECK(invoke({"blocks", "--n", "2", "--out", fresh("small").string()}).code == cli::kExitValidation);
}

TEST_CASE("manifest and outputs") {
  const auto dir = fresh("blocks_range");
  REQUIRE(invoke({"blocks", "--n", "8..10", "--out", dir.string()}).code == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "blocks");
  CHECK(manifest.contains("version"));
  CHECK(manifest.contains("seed"));
  CHECK(manifest["outputs"].size() >= 1);
  std::size_t expected = 0;
  for (int n = 8; n <= 10; ++n) expected += truncation::block_decomposition(n).blocks.size();
  std::istringstream csv(slurp(dir / "blocks.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(csv, line);
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == expected);
}

TEST_CASE("worker count does not change outputs") {
  std::string reference;
  for (const char* w : {"1", "4", "8"}) {
    const auto dir = fresh(std::string("lil_w") + w);
    auto args = lil_args(dir);
    args.insert(args.end(), {"--workers", w});
    REQUIRE(invoke(args).code == 0);
    const std::string body = slurp(dir / "lil.csv");
    CHECK(body.size() > 100);
    if (reference.empty()) reference = body;
    CHECK(body == reference);
  }
  std::string moments_ref;
  for (const char* w : {"1", "4"}) {
    const auto dir = fresh(std::string("mom_w") + w);
    REQUIRE(invoke({"moments", "--source", "pareto", "--m-grid", "2^8..2^9", "--blocks-per-shard", "20", "--workers", w,
                    "--out", dir.string()})
                .code == 0);
    const std::string body = slurp(dir / "moments_full.csv");
    if (moments_ref.empty()) moments_ref = body;
    CHECK(body == moments_ref);
  }
}

TEST_CASE("resume reproduces the one-shot run") {
  const auto once = fresh("lil_once");
  REQUIRE(invoke(lil_args(once)).code == 0);

  const auto part = fresh("lil_part");
  const auto ckpt = fresh("lil_ckpt");
  auto args = lil_args(part);
  args.insert(args.end(), {"--checkpoint", ckpt.string(), "--checkpoint-every", "2^11", "--stop-after", "2^13",
                           "--workers", "2"});
  REQUIRE(invoke(args).code == 0);
  CHECK(fs::exists(ckpt / "lil.ckpt"));
  CHECK_FALSE(fs::exists(part / "lil.csv"));

  REQUIRE(invoke({"resume", "--checkpoint", ckpt.string()}).code == 0);
  CHECK(slurp(part / "lil.csv") == slurp(once / "lil.csv"));
  CHECK(slurp(part / "lil.json") == slurp(once / "lil.json"));
}

TEST_CASE("damaged or foreign checkpoints are rejected") {
  const auto out = fresh("lil_bad");
  const auto ckpt = fresh("lil_bad_ckpt");
  auto args = lil_args(out);
  args.insert(args.end(), {"--checkpoint", ckpt.string(), "--checkpoint-every", "2^12", "--stop-after", "2^12",
                           "--workers", "2"});
  REQUIRE(invoke(args).code == 0);
  const fs::path file = ckpt / "lil.ckpt";
  const std::string good = slurp(file);

  SUBCASE("one edited byte") {
    std::string text = good;
    const auto pos = text.find("\"seed\":3");
    REQUIRE(pos != std::string::npos);
    text[pos + 7] = '4';
    spit(file, text);
    const auto o = invoke({"resume", "--checkpoint", ckpt.string()});
    CHECK(o.code == cli::kExitValidation);
    CHECK(o.err.find("CorruptCheckpoint") != std::string::npos);
  }
  SUBCASE("other version") {
    std::string body = good.substr(good.find('\n') + 1);
    const auto pos = body.find("\"version\":\"");
    REQUIRE(pos != std::string::npos);
    body.insert(pos + 11, "9.");
    char header[64];
    std::snprintf(header, sizeof header, "fnv1a64 %016llx\n", static_cast<unsigned long long>(cli::fnv1a(body)));
    spit(file, header + body);
    const auto o = invoke({"resume", "--checkpoint", ckpt.string()});
    CHECK(o.code == cli::kExitValidation);
    CHECK(o.err.find("VersionMismatch") != std::string::npos);
  }
  SUBCASE("other worker count") {
    const auto o = invoke({"resume", "--checkpoint", ckpt.string(), "--workers", "4"});
    CHECK(o.code == cli::kExitValidation);
    CHECK(o.err.find("LayoutMismatch") != std::string::npos);
  }
  SUBCASE("missing file") {
    fs::remove(file);
    CHECK(invoke({"resume", "--checkpoint", ckpt.string()}).code == cli::kExitValidation);
  }
}

TEST_CASE("verify gates map onto exit code 3") {
  const auto dir = fresh("lil_gate");
  const auto o = invoke({"lil", "--source", "gaussian", "--nmax", "2^12", "--streams", "16", "--lambda", "100",
                         "--verify", "--out", dir.string()});
  CHECK(o.code == cli::kExitVerifyFailed);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["verify"].is_array());
}

TEST_CASE("report-data writes the renderer schemas") {
  const auto dir = fresh("report");
  REQUIRE(invoke({"report-data", "--out", dir.string()}).code == 0);
  const auto header = [&](const char* file) {
    std::istringstream in(slurp(dir / file));
    std::string line;
    std::getline(in, line);
    return line;
  };
  CHECK(header("normalizers.csv") == "n,a_n,c_star_n,d_n,dbar_n,gamma_scalar");
  CHECK(header("blocks.csv") == "n,kind,j,start,len");
  CHECK(header("survival.csv") == "t,exceedances,survival");
  CHECK(header("moments_full.csv") == "m,R,est4,se4,ratio4,cov11,cov12,cov22,ratio2");
  for (const char* f : {"series.json", "hl0.json", "appendix.json", "tails.json", "clt.json", "normalizers.json"}) {
    CAPTURE(f);
    CHECK_NOTHROW((void)nlohmann::json::parse(slurp(dir / f)));
  }
  const auto tails = nlohmann::json::parse(slurp(dir / "tails.json"));
  for (const char* key : {"alpha_hat", "C_hat", "angular", "per_corridor"}) CHECK(tails.contains(key));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "report-data");
  CHECK(manifest["version"].is_string());
  for (const auto& f : manifest["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
  for (const char* section : {"normalizers", "series", "blocks", "tails", "clt", "moments"})
    CHECK(manifest["config"].contains(section));
}
