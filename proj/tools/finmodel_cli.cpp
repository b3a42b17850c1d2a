#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finmodel/workspace.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finmodel: a desk-scale engine for finite model categories"};
  app.require_subcommand(1);

  std::string run_path;
  std::string out_path;
  auto* run_cmd = app.add_subcommand("run", "execute a workspace document");
  run_cmd->add_option("file", run_path, "workspace JSON file, or - for stdin")->required();
  run_cmd->add_option("-o,--output", out_path, "write the report to a file");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a document");
  validate_cmd->add_option("file", validate_path, "workspace JSON file, or - for stdin")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      finmodel::ws::parse(read_input(validate_path));
      std::cout << "valid\n";
      return 0;
    }
    auto workspace = finmodel::ws::parse(read_input(run_path));
    auto result = finmodel::ws::run(workspace);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      out << result.report;
    } else {
      std::cout << result.report;
    }
    return result.exit_code;
  } catch (const finmodel::ws::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const finmodel::ws::NameError& e) {
    std::cerr << "name error: " << e.what() << "\n";
    return 2;
  } catch (const finmodel::ws::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
