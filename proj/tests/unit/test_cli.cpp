#include <doctest.h>

#include <stdlib.h>
#include <sys/wait.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

const std::string kCli = FRAGCHAIN_CLI_PATH;

int exit_code(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string output(const std::string& args) {
  std::string out;
  FILE* pipe = popen((kCli + " " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 256> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  pclose(pipe);
  return out;
}

}  // namespace

TEST_CASE("analytic queries") {
  CHECK(output("analytic --law uniform_binary --kappa 2") == "0.333333333333\n");
  CHECK(output("analytic --law uniform_binary --kappa 3") == "0.5\n");
  CHECK(output("analytic --law uniform_binary --kappa-derivative 1") == "0.5\n");
  CHECK(output("analytic --law uniform_binary --pbar") == "2.414213562373\n");
  CHECK(output("analytic --law lossy_binary --malthusian") == "0.456999559135\n");
  CHECK(output("analytic --law uniform_binary --exit-density 0.25") == "0.5\n");
}

TEST_CASE("exit codes") {
  CHECK(exit_code("analytic --law uniform_binary --kappa 2") == 0);
  CHECK(exit_code("") != 0);
  CHECK(exit_code("verify --suite AC99") == 2);
  CHECK(exit_code("simulate --config /nonexistent.json") == 3);
  CHECK(exit_code("analytic --law nope --kappa 2") == 4);
  CHECK(exit_code("analytic --law deterministic_binary --param r=0.5 --alpha 1 --rho 1") == 5);
  CHECK(exit_code("analytic --law uniform_binary --exit-density 1.5") == 8);
  CHECK(exit_code("verify --suite AC1 --out /proc/nope") == 6);
  CHECK(exit_code("verify --suite AC1") == 0);
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string temp_dir() {
  std::string pattern = "/tmp/fragchain-cli-XXXXXX";
  REQUIRE(mkdtemp(pattern.data()) != nullptr);
  return pattern;
}

}  // namespace

TEST_CASE("outputs carry a manifest line and are reproducible") {
  const std::string config = std::string(FRAGCHAIN_SOURCE_DIR) + "/configs/homogeneous_binary.json";
  const auto a = temp_dir(), b = temp_dir();
  for (const auto& dir : {a, b}) {
    REQUIRE(exit_code("simulate --config " + config + " --seed 3 --replicas 4 --out " + dir) == 0);
    REQUIRE(exit_code("duality --seed 3 --replicas 5 --out " + dir) == 0);
    REQUIRE(exit_code("verify --suite AC1 --out " + dir) == 0);
  }
  for (const char* name : {"trajectory.csv", "events.csv", "merges.csv", "report.csv"}) {
    const auto text = slurp(a + "/" + name);
    CHECK(text.rfind("# manifest ", 0) == 0);
    CHECK(text == slurp(b + "/" + name));
  }
  const auto manifest = slurp(a + "/manifest.json");
  CHECK(manifest.find("\"manifest_hash\"") < manifest.find("\"command\""));
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
