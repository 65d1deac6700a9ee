#include "lpsim/kernel_export.h"

#include <algorithm>
#include <cstdio>
#include <string>

#include "lpsim/error.h"
#include "lpsim/image_io.h"

namespace lpsim {
namespace fs = std::filesystem;
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

}  // namespace

Image kernel_heatmap(const Kernel& kernel) {
  Image out(kernel.size(), kernel.size(), 1);
  const auto w = kernel.weights();
  const double peak = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  for (int j = 0; j < kernel.size(); ++j) {
    for (int i = 0; i < kernel.size(); ++i) {
      out.at(i, j, 0) = peak > 0.0 ? kernel.at(i, j) / peak : 0.0;
    }
  }
  return out;
}

std::string cross_sections_csv(const Kernel& kernel) {
  std::string out = "offset,horizontal,vertical\n";
  const int r = kernel.radius();
  for (int k = 0; k < kernel.size(); ++k) {
    out += std::to_string(k - r) + "," + fmt_double(kernel.at(k, r)) + "," +
           fmt_double(kernel.at(r, k)) + "\n";
  }
  return out;
}

std::string displacement_csv(const DisplacementField& field) {
  std::string out = "x,y,dx,dy\n";
  const int c = field.size / 2;
  for (int j = 0; j < field.size; ++j) {
    for (int i = 0; i < field.size; ++i) {
      const std::size_t k = field.index(i, j);
      out += std::to_string(i - c) + "," + std::to_string(j - c) + "," +
             fmt_double(field.dx[k]) + "," + fmt_double(field.dy[k]) + "\n";
    }
  }
  return out;
}

std::string profile_csv(const std::vector<ProfileSample>& profile) {
  std::string out = "radius_fraction,intensity\n";
  for (const auto& p : profile) {
    out += fmt_double(p.radius_fraction) + "," + fmt_double(p.intensity) + "\n";
  }
  return out;
}

KernelExport export_kernel_set(const fs::path& out_dir, const AlsfParams& params,
                               bool renormalize, bool with_profile) {
  params.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), "cannot create output directory");

  const Kernel apsf = generate_apsf(params.base);
  const DisplacementField field = build_displacement_field(params, params.base.size);
  const Kernel alsf = warp_apsf(apsf, field, renormalize);

  KernelExport result;
  auto add = [&](const char* name) {
    result.files.push_back(out_dir / name);
    return result.files.back();
  };
  write_pnm(add("apsf.pgm"), kernel_heatmap(apsf), 16);
  write_text(add("displacement.csv"), displacement_csv(field));
  write_pnm(add("alsf.pgm"), kernel_heatmap(alsf), 16);
  write_text(add("apsf_cross_sections.csv"), cross_sections_csv(apsf));
  write_text(add("alsf_cross_sections.csv"), cross_sections_csv(alsf));
  if (with_profile) {
    write_text(add("apsf_profile.csv"),
               profile_csv(apsf_radial_profile(params.base, 512)));
  }
  return result;
}

}  // namespace lpsim
