// Command-line front end: synth, infer, render, serve.

#include <iostream>

#include <CLI11.hpp>

#include "autostroke/cli.hpp"
#include "autostroke/server.hpp"

namespace {

std::pair<int, int> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--size", "expected WxH");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace autostroke;
  CLI::App app{"Image-guided stroke autocomplete"};
  app.require_subcommand(1);

  cli::SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Batch-fill a region from the latest stroke group");
  s->add_option("document", synth.input.document, "Input document JSON")->required();
  s->add_option("-o,--out", synth.out, "Output document JSON")->required();
  s->add_option("--image", synth.input.image, "Reference PNG (default: document field)");
  s->add_option("--labels", synth.input.labels, "Label map PNG, class id in red");
  s->add_option("--png", synth.png, "Rendered output PNG (default: <out>.png)");
  s->add_option("--region-mask", synth.region_mask, "Region PNG, nonzero red is inside");
  s->add_option("--exemplar", synth.exemplar_ids, "Explicit exemplar stroke ids")->delimiter(',');
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--iterations", synth.iterations, "EM iterations")->check(CLI::PositiveNumber);
  s->add_option("--mu", synth.mu, "Image term weight")->check(CLI::NonNegativeNumber);
  s->add_option("--spacing", synth.spacing, "Density triple: spacing");
  s->add_option("--lightness", synth.lightness, "Density triple: lightness coefficient");
  s->add_option("--gradient", synth.gradient, "Density triple: gradient coefficient");
  s->add_option("--orientation", synth.orientation, "global or flow");
  s->add_flag("--provenance", synth.provenance, "Render manual black, autocompleted red");

  cli::InputOptions infer;
  auto* i = app.add_subcommand("infer", "Report exemplar, region, orientation and density inference as JSON");
  i->add_option("document", infer.document, "Input document JSON")->required();
  i->add_option("--image", infer.image, "Reference PNG (default: document field)");
  i->add_option("--labels", infer.labels, "Label map PNG");

  cli::RenderCmdOptions render;
  std::string size;
  auto* r = app.add_subcommand("render", "Rasterize a document to PNG or SVG");
  r->add_option("document", render.document, "Input document JSON")->required();
  r->add_option("-o,--out", render.out, "Output .png or .svg")->required();
  r->add_option("--image", render.image, "Reference PNG giving the canvas size");
  r->add_option("--size", size, "Canvas size WxH");
  r->add_flag("--provenance", render.provenance, "Manual black, autocompleted red");

  ServerOptions serve;
  auto* v = app.add_subcommand("serve", "Serve the UI and the session protocol");
  v->add_option("document", serve.document_path, "Document JSON (created on save if missing)")->required();
  v->add_option("--image", serve.image_path, "Reference PNG")->required();
  v->add_option("--labels", serve.label_path, "Label map PNG");
  v->add_option("--web", serve.web_root, "Static asset directory")->default_val(AUTOSTROKE_WEB_ROOT);
  v->add_option("--address", serve.address, "Bind address")->default_val("127.0.0.1");
  v->add_option("--port", serve.port, "Port")->default_val(8080);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::failure;
  }

  if (s->parsed()) return cli::cmd_synth(synth, std::cout, std::cerr);
  if (i->parsed()) return cli::cmd_infer(infer, std::cout, std::cerr);
  if (r->parsed()) {
    try {
      if (!size.empty()) render.size = parse_size(size);
    } catch (const std::exception& e) {
      std::cerr << "autostroke: bad --size: " << e.what() << '\n';
      return cli::failure;
    }
    return cli::cmd_render(render, std::cerr);
  }
  try {
    Server server(serve);
    std::cout << "serving on http://" << serve.address << ':' << server.port() << '/' << std::endl;
    server.run();
  } catch (const Error& e) {
    std::cerr << "autostroke: " << e.what() << '\n';
    return cli::failure;
  }
  return cli::ok;
}
