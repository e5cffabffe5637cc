#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adelic/cli.hpp"

using namespace adelic;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int s = run(args, out, err);
  return {s, out.str(), err.str()};
}

}  // namespace

TEST_CASE("scalar commands print a headline") {
  auto h = call({"canonical-height", "--map", "z^2", "--point", "2"});
  CHECK(h.status == 0);
  CHECK(h.out.rfind("0.693147180559945", 0) == 0);
  CHECK(call({"product-formula", "--value", "100/7"}).out == "0\n");
  CHECK(call({"gateaux-check", "--family", R"({"roofs":{"inf":0.5}})"}).out == "1.8\n");
  CHECK(call({"ess-min", "--map", "z^2"}).out == "[0, 0]\n");
  CHECK(cli_commands().size() == 10);
}

TEST_CASE("table commands print CSV or JSON") {
  auto t = call({"tate-iterate", "--map", "z^2+1", "--N", "3"});
  CHECK(t.status == 0);
  CHECK(t.out.rfind("n,increment,bound\n", 0) == 0);
  CHECK(std::count(t.out.begin(), t.out.end(), '\n') == 4);

  auto j = call({"rn-check", "--case", "bump", "--json"});
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["cases"][0]["pass"] == false);
  CHECK(doc["cases"][0]["failing_places"][0] == "inf");

  auto c = call({"chi-volume", "--family", R"({"roofs":{"inf":0.5}})", "--N", "2"});
  CHECK(c.out == "n,estimate,closed_form,abs_error\n1,2,1,1\n2,1.5,1,0.5\n");
}

TEST_CASE("errors are machine readable") {
  auto e = call({"canonical-height", "--map", "z^2"});
  CHECK(e.status == 2);
  auto doc = nlohmann::json::parse(e.err);
  CHECK(doc["command"] == "canonical-height");
  CHECK(doc.contains("error"));

  auto bad = call({"canonical-height", "--map", "3z", "--point", "1"});
  CHECK(bad.status == 2);
  CHECK(nlohmann::json::parse(bad.err)["error"] == "degree must exceed 1");
  CHECK(call({"bogus"}).status == 2);
  CHECK(call({"tate-iterate", "--map", "z^2", "--tol", "-1"}).status == 2);
}

TEST_CASE("config files with flag overrides") {
  auto dir = std::filesystem::temp_directory_path() / "adelic_cli_test";
  std::filesystem::create_directories(dir);
  auto cfg = (dir / "cfg.json").string();
  std::ofstream(cfg) << R"({"command": "canonical-height", "map": "z^2", "point": "2"})";
  CHECK(call({"canonical-height", "--config", cfg}).out.rfind("0.693147180559945", 0) == 0);
  // The flag wins over the file.
  CHECK(call({"canonical-height", "--config", cfg, "--point", "4"}).out.rfind("1.38629436111989", 0) == 0);

  std::ofstream(cfg) << R"({"map": "z^2", "colour": 3})";
  CHECK(call({"canonical-height", "--config", cfg, "--point", "2"}).status == 2);
  std::ofstream(cfg) << R"({"command": "ess-min", "map": "z^2"})";
  CHECK(call({"canonical-height", "--config", cfg, "--point", "2"}).status == 2);

  auto base = (dir / "eq").string();
  auto r = call({"equidistribute", "--map", "z^2", "--target", "2", "--N", "3", "--out", base});
  CHECK(r.status == 0);
  CHECK(std::filesystem::exists(base + ".csv"));
  std::ifstream js(base + ".json");
  auto doc = nlohmann::json::parse(js);
  CHECK(doc.is_object());
  std::filesystem::remove_all(dir);
}
