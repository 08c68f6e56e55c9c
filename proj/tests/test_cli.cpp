// End-to-end runs of the crreduce binary: exit codes and report contents.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kScratch = CRREDUCE_SCRATCH;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args, const std::string& env = {}) {
  fs::create_directories(kScratch);
  const fs::path out = kScratch / "stdout.txt", err = kScratch / "stderr.txt";
  const std::string cmd = env + " '" CRREDUCE_BIN "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string path(const std::string& name) { return (kScratch / name).string(); }

void write(const std::string& name, const json& j) {
  fs::create_directories(kScratch);
  std::ofstream(path(name)) << j.dump(2);
}

json read(const std::string& name) { return json::parse(slurp(path(name))); }

json std2_cr() {
  return json{{"mode", "cr"}, {"n", 1}, {"omega", {{0, 1}, {-1, 0}}}, {"structure", {{0, -1}, {1, 0}}}};
}

}  // namespace

TEST_CASE("reduce on the standard pair") {
  write("std2.json", std2_cr());
  const Run r = run("reduce " + path("std2.json") + " --output " + path("std2_report.json"));
  REQUIRE(r.code == 0);
  const json rep = read("std2_report.json");
  CHECK(rep["verdict"] == "pass");
  const json k = rep["K"];
  CHECK(std::abs(k[0][0].get<double>()) <= 1e-10);
  CHECK(std::abs(k[0][1].get<double>() + 1.0) <= 1e-10);
  CHECK(std::abs(k[1][0].get<double>() - 1.0) <= 1e-10);
  CHECK(std::abs(k[1][1].get<double>()) <= 1e-10);
  CHECK(rep.contains("det_e"));
  CHECK(rep.contains("e"));
}

TEST_CASE("generate, reduce and verify the perturbed fixture") {
  Run g = run("generate --mode cr --n 2 --signature 2,0 --epsilon 0.3 --seed 0 --kind generic --standard-basis --output " +
              path("pert4.json") + " --family-output " + path("pert4_family.json"));
  REQUIRE(g.code == 0);
  const Run r = run("reduce " + path("pert4.json") + " --seed 3 --output " + path("pert4_report.json"));
  CHECK(r.code == 0);
  CHECK(read("pert4_report.json")["verdict"] == "pass");
  const Run v = run("verify " + path("pert4.json") + " --seeds 0..9 --output " + path("pert4_verify.json"));
  CHECK(v.code == 0);
  const json rep = read("pert4_verify.json");
  for (const auto& c : rep["checks"]) {
    CAPTURE(c.dump());
    CHECK(c["verdict"] == "pass");
  }
  REQUIRE(rep["experimental"].contains("scale_invariance_-1"));
  CHECK(rep["experimental"]["scale_invariance_-1"]["value"].get<double>() <= 1e-8);
  const Run p = run("path --family " + path("pert4_family.json") + " --t-start 0 --t-end 0.3 --samples 16 --output " +
                    path("pert4_path.json"));
  CHECK(p.code == 0);
  const json path_rep = read("pert4_path.json");
  CHECK(path_rep["crossings"].empty());
  CHECK(path_rep["modulus_of_continuity"].get<double>() > 0.0);
}

TEST_CASE("corrupted K fails verify with exit 3") {
  write("std2.json", std2_cr());
  Run g = run("generate --mode cr --n 2 --epsilon 0.3 --kind generic --output " + path("gen.json"));
  REQUIRE(g.code == 0);
  const Run v = run("verify " + path("gen.json") + " --debug-corrupt-k");
  CHECK(v.code == 3);
  CHECK(v.err.find("hermitian_residual") != std::string::npos);
}

TEST_CASE("degenerate fixture: reduce exits 2, classify reports mixed") {
  const Run g = run("generate --mode cr --n 2 --kind degenerate --seed 0 --output " + path("deg4.json") +
                    " --family-output " + path("deg4_family.json"));
  REQUIRE(g.code == 0);
  CHECK(g.out.find("t_star") != std::string::npos);
  const Run r = run("reduce " + path("deg4.json") + " --output " + path("deg4_report.json"));
  CHECK(r.code == 2);
  const json rep = read("deg4_report.json");
  CHECK(rep["verdict"] == "not_generic");
  CHECK(rep["genericity"]["min_im"].get<double>() <= 1e-7 * rep["genericity"]["scale"].get<double>());

  const Run c = run("classify " + path("deg4.json") + " --output " + path("deg4_classify.json"));
  CHECK(c.code == 0);
  const json cls = read("deg4_classify.json");
  CHECK(cls["kind"] == "mixed");
  CHECK(cls["bad_rank"] == 4);
  CHECK(cls.contains("mixed"));

  const Run p = run("path --family " + path("deg4_family.json") + " --t-start 0 --t-end 2 --samples 21 --output " +
                    path("deg4_path.json"));
  CHECK(p.code == 0);
  const json pr = read("deg4_path.json");
  CHECK(pr["t_star_bracketed"] == true);
  REQUIRE(pr["crossings"].size() == 1);
}

TEST_CASE("singular nu is reported as degenerate_form") {
  const json inst{{"mode", "cr"},
                  {"n", 2},
                  {"omega", {{0, 0, 1, 0}, {0, 0, 0, -1}, {-1, 0, 0, 0}, {0, 1, 0, 0}}},
                  {"structure", {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}}};
  write("singular_nu.json", inst);
  const Run c = run("classify " + path("singular_nu.json") + " --output " + path("singular_nu_report.json"));
  CHECK(c.code == 0);
  CHECK(read("singular_nu_report.json")["kind"] == "degenerate_form");
  const Run r = run("reduce " + path("singular_nu.json"));
  CHECK(r.code == 2);
}

TEST_CASE("input errors exit 1") {
  CHECK(run("reduce " + path("does_not_exist.json")).code == 1);
  json bad = std2_cr();
  bad["unexpected"] = true;
  write("bad.json", bad);
  CHECK(run("reduce " + path("bad.json")).code == 1);
  json nonskew = std2_cr();
  nonskew["omega"][0][0] = 1.0;
  write("nonskew.json", nonskew);
  CHECK(run("reduce " + path("nonskew.json")).code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("reduce").code == 1);
  CHECK(run("verify " + path("bad.json") + " --seeds x").code == 1);
  CHECK(run("generate --kind generic --epsilon 0.3 --n 2 --signature 3,0 --output " + path("x.json")).code == 1);
}

TEST_CASE("an unreachable genericity margin exits 4") {
  const Run g = run("generate --kind generic --n 2 --epsilon 0.3 --tol-eig 0.9 --output " + path("never.json"));
  CHECK(g.code == 4);
}

TEST_CASE("tolerance precedence: environment, file, flag") {
  write("std2.json", std2_cr());
  Run r = run("reduce " + path("std2.json") + " --output " + path("tol_env.json"), "CRREDUCE_TOL=1e-11,2e-7,3e-8");
  REQUIRE(r.code == 0);
  json t = read("tol_env.json")["tolerances"];
  CHECK(t["tau_rank"] == 1e-11);
  CHECK(t["tau_eig"] == 2e-7);
  CHECK(t["tau_verify"] == 3e-8);

  json with_file = std2_cr();
  with_file["tolerances"] = json{{"tau_eig", 5e-7}};
  write("std2_tol.json", with_file);
  r = run("reduce " + path("std2_tol.json") + " --tol-verify 4e-8 --output " + path("tol_file.json"),
          "CRREDUCE_TOL=1e-11,2e-7,3e-8");
  REQUIRE(r.code == 0);
  t = read("tol_file.json")["tolerances"];
  CHECK(t["tau_rank"] == 1e-11);
  CHECK(t["tau_eig"] == 5e-7);
  CHECK(t["tau_verify"] == 4e-8);

  CHECK(run("reduce " + path("std2.json"), "CRREDUCE_TOL=garbage").code == 1);
  CHECK(run("reduce " + path("std2.json") + " --tol-rank 1e-6 --tol-verify 1e-9").code == 1);
}

TEST_CASE("lagrangian generation and reduction") {
  const Run g = run("generate --mode lagrangian --n 3 --epsilon 0.2 --seed 4 --kind generic --output " + path("lag.json"));
  REQUIRE(g.code == 0);
  const Run r = run("reduce " + path("lag.json") + " --output " + path("lag_report.json"));
  CHECK(r.code == 0);
  const json rep = read("lag_report.json");
  CHECK(rep["mode"] == "lagrangian");
  CHECK(rep["verdict"] == "pass");
}

TEST_CASE("path over explicit files") {
  write("std2.json", std2_cr());
  const Run p = run("path " + path("std2.json") + " " + path("std2.json") + " " + path("std2.json") +
                    " --output " + path("files_path.json"));
  CHECK(p.code == 0);
  const json rep = read("files_path.json");
  CHECK(rep["samples"].size() == 3);
  CHECK(rep["modulus_of_continuity"].get<double>() <= 1e-12);
  CHECK(run("path " + path("std2.json")).code == 1);
}
