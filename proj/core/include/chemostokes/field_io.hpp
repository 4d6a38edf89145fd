#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chemostokes/grid.hpp"

namespace chemostokes {

/// `.fld` snapshot: one UTF-8 JSON header line
/// {"name","units","dim","cells","lengths","time"} followed by little-endian
/// float64 values in C order (last axis fastest). For a face component the
/// `cells` entry is the face-array shape (N_a + 1 on the normal axis).
struct FieldHeader {
  std::string name;
  std::string units;
  int dim = 2;
  std::vector<int> cells;
  std::vector<double> lengths;
  double time = 0.0;
};

void write_fld(const std::filesystem::path& path, const FieldHeader& header,
               std::span<const double> values);

struct FldContents {
  FieldHeader header;
  std::vector<double> values;
};
FldContents read_fld(const std::filesystem::path& path);

void write_scalar_fld(const std::filesystem::path& path, const std::string& name,
                      const std::string& units, const ScalarField& f, double time);
ScalarField read_scalar_fld(const std::filesystem::path& path);

/// Writes component `axis` of F as its own .fld file.
void write_face_fld(const std::filesystem::path& path, const std::string& name,
                    const std::string& units, const FaceVectorField& F, int axis, double time);

// Raw little-endian float64 helpers shared with checkpoints.
void write_le_doubles(std::ostream& os, std::span<const double> values);
void read_le_doubles(std::istream& is, std::span<double> values);

}  // namespace chemostokes
