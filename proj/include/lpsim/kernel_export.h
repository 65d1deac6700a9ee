#ifndef LPSIM_KERNEL_EXPORT_H_
#define LPSIM_KERNEL_EXPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "lpsim/alsf.h"
#include "lpsim/apsf.h"
#include "lpsim/image.h"

namespace lpsim {

// Kernel scaled so its maximum maps to 1.
Image kernel_heatmap(const Kernel& kernel);

// "offset,horizontal,vertical" rows through the kernel center.
std::string cross_sections_csv(const Kernel& kernel);

// "x,y,dx,dy" rows, x and y relative to the center.
std::string displacement_csv(const DisplacementField& field);

// "radius_fraction,intensity" rows.
std::string profile_csv(const std::vector<ProfileSample>& profile);

struct KernelExport {
  std::vector<std::filesystem::path> files;
};

// Writes apsf.pgm, displacement.csv, alsf.pgm, apsf_cross_sections.csv and
// alsf_cross_sections.csv (16-bit heatmaps), plus apsf_profile.csv when
// `with_profile` is set.
KernelExport export_kernel_set(const std::filesystem::path& out_dir,
                               const AlsfParams& params, bool renormalize,
                               bool with_profile);

}  // namespace lpsim

#endif  // LPSIM_KERNEL_EXPORT_H_
