#include "core/output.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <sstream>

#include "core/config.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

namespace poroplate {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr char kMagic[8] = {'P', 'O', 'R', 'O', 'P', 'L', 'T', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

void write_all(const std::string& path, const void* data, std::size_t size,
               std::FILE* f) {
  if (std::fwrite(data, 1, size, f) != size)
    throw IoError("short write to '" + path + "'");
}

}  // namespace

OutputDir::OutputDir(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec)
    throw IoError("cannot create output directory '" + dir_ +
                  "': " + ec.message());
}

void OutputDir::write_text(const std::string& name, const std::string& content,
                           const std::string& shape) {
  const std::string path = dir_ + "/" + name;
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_all(path, content.data(), content.size(), f.get());
  files_.push_back(name);
  manifest_lines_.push_back(name + " text " + shape);
}

void OutputDir::write_binary(const std::string& name, unsigned kind,
                             const double* data, std::size_t count,
                             const std::string& shape) {
  const std::string path = dir_ + "/" + name;
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::uint32_t version = kFormatVersion;
  std::uint32_t kind32 = kind;
  write_all(path, kMagic, sizeof(kMagic), f.get());
  write_all(path, &version, sizeof(version), f.get());
  write_all(path, &kind32, sizeof(kind32), f.get());
  write_all(path, data, count * sizeof(double), f.get());
  files_.push_back(name);
  manifest_lines_.push_back(name + " binary " + shape);
}

void OutputDir::write_plate_snapshot(const std::string& name,
                                     const SineBasis& basis,
                                     const PlateField& field) {
  write_binary(name, 1, field.coef.data(), field.coef.size(),
               "kind=plate M=" + std::to_string(basis.M()) +
                   " N=" + std::to_string(basis.N()) +
                   " doubles=" + std::to_string(field.coef.size()));
}

void OutputDir::write_pressure_snapshot(const std::string& name,
                                        const SineBasis& basis,
                                        const TransverseGrid& grid,
                                        const PressureField& field) {
  write_binary(name, 2, field.val.data(), field.val.size(),
               "kind=pressure M=" + std::to_string(basis.M()) +
                   " N=" + std::to_string(basis.N()) +
                   " N3=" + std::to_string(grid.N3()) +
                   " doubles=" + std::to_string(field.val.size()));
}

void OutputDir::write_manifest() {
  std::string body;
  for (const std::string& line : manifest_lines_) body += line + "\n";
  const std::string path = dir_ + "/manifest.txt";
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_all(path, body.data(), body.size(), f.get());
  files_.push_back("manifest.txt");
}

std::string qs_timeseries_csv(const OperatorContext& ctx, const QSRun& run) {
  std::ostringstream out;
  out << "t,energy,pressure_l2,w_l2,zeta_l2,cg_iterations,cg_residual\n";
  for (const QSState& s : run.states) {
    out << format_double(s.t) << ',' << format_double(s.energy) << ','
        << format_double(pressure_l2(ctx.grid, s.p)) << ','
        << format_double(plate_l2(s.w)) << ','
        << format_double(pressure_l2(ctx.grid, s.zeta)) << ','
        << s.cg_iterations << ',' << format_double(s.cg_residual) << "\n";
  }
  return out.str();
}

std::string inertial_timeseries_csv(const OperatorContext& ctx,
                                    const InertialRun& run) {
  std::ostringstream out;
  out << "t,energy,w_l2,v_l2,pressure_l2\n";
  for (const InertialState& s : run.states) {
    out << format_double(s.t) << ',' << format_double(s.energy) << ','
        << format_double(plate_l2(s.w)) << ',' << format_double(plate_l2(s.v))
        << ',' << format_double(pressure_l2(ctx.grid, s.p)) << "\n";
  }
  return out.str();
}

std::string midplane_pressure_csv(const OperatorContext& ctx,
                                  const PressureField& p) {
  const SineBasis& basis = ctx.basis;
  const TransverseGrid& grid = ctx.grid;
  if (grid.N3() % 2 == 0)
    throw ValidationError("midplane slice requires odd N3");
  const int mid = (grid.N3() - 1) / 2;

  std::ostringstream out;
  out << "x1,x2,p\n";
  for (int i = 1; i <= basis.M(); ++i) {
    for (int l = 1; l <= basis.N(); ++l) {
      double value = 0.0;
      for (int m = 1; m <= basis.M(); ++m)
        for (int n = 1; n <= basis.N(); ++n)
          value += p.column(basis.index(m, n))[mid] * basis.phi(m, n, i, l);
      out << format_double(basis.x1(i)) << ',' << format_double(basis.x2(l))
          << ',' << format_double(value) << "\n";
    }
  }
  return out.str();
}

std::string plate_centerline_csv(const OperatorContext& ctx,
                                 const PlateField& w) {
  const SineBasis& basis = ctx.basis;
  std::ostringstream out;
  out << "x1,w\n";
  for (int i = 1; i <= basis.M(); ++i) {
    double x1 = basis.x1(i);
    double value = 0.0;
    for (int m = 1; m <= basis.M(); ++m) {
      for (int n = 1; n <= basis.N(); ++n) {
        value += w.coef[basis.index(m, n)] * 2.0 * std::sin(m * kPi * x1) *
                 std::sin(n * kPi * 0.5);
      }
    }
    out << format_double(x1) << ',' << format_double(value) << "\n";
  }
  return out.str();
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
  std::ostringstream out;
  out << "suite,name,pass,value,bound\n";
  for (const CheckResult& c : checks) {
    out << c.suite << ',' << c.name << ',' << (c.pass ? "PASS" : "FAIL") << ','
        << format_double(c.value) << ',' << format_double(c.bound) << "\n";
  }
  return out.str();
}

std::string convergence_csv(
    const std::vector<std::pair<std::string, ConvergenceStudy>>& studies) {
  std::ostringstream out;
  out << "study,scale,error\n";
  for (const auto& [label, study] : studies) {
    for (std::size_t i = 0; i < study.scales.size(); ++i) {
      out << label << ',' << format_double(study.scales[i]) << ','
          << format_double(study.errors[i]) << "\n";
    }
  }
  return out.str();
}

}  // namespace poroplate
