#ifndef CONTACTQD_CSV_HPP
#define CONTACTQD_CSV_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "contactqd/analysis.hpp"
#include "contactqd/dynamics.hpp"
#include "contactqd/errors.hpp"
#include "contactqd/scenario.hpp"

namespace cqd {

/// Lossless double formatting (17 significant digits, dot separator).
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes through a temp file in the same directory, then renames.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

/// Simulation CSV: one row per sample, coordinates re-expressed in the
/// reference chart (inf columns if a sample sits exactly on its deleted
/// locus). Times are in hbar/energy units.
inline std::string simulation_csv(const Scenario& sc, const Trajectory& traj,
                                  const std::vector<ObservableRow>& rows) {
  const int n = sc.n;
  const int ref = sc.reference_chart > 0 ? sc.reference_chart : n;
  const bool want_z = sc.wants("z");
  const bool want_bloch = n == 2 && sc.wants("bloch");
  std::ostringstream os;
  os << "# time in hbar/energy units; z dimensionless (chart " << ref
     << "); S in energy*time units; e_H in energy units; var_H in energy^2; "
        "P, x1..x3 dimensionless\n";
  os << "t";
  if (want_z)
    for (int k = 1; k <= n - 1; ++k) os << ",z" << k << "_re,z" << k << "_im";
  if (sc.wants("S")) os << ",S";
  if (sc.wants("e_H")) os << ",e_H";
  if (sc.wants("var_H")) os << ",var_H";
  if (sc.wants("P")) os << ",P";
  if (want_bloch) os << ",x1,x2,x3";
  os << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << csv_num(traj.times[i]);
    if (want_z) {
      const ProjectiveState& s = traj.states[i].point;
      bool expressible = true;
      ProjectiveState sref = s;
      if (s.chart != ref) {
        Eigen::VectorXcd psi = homogeneous(s);
        if (std::abs(psi[ref - 1]) < kChartThreshold * psi.norm())
          expressible = false;
        else
          sref = project(psi, ref);
      }
      for (int k = 0; k < n - 1; ++k) {
        if (expressible)
          os << "," << csv_num(sref.z[k].real()) << ","
             << csv_num(sref.z[k].imag());
        else
          os << ",inf,inf";
      }
    }
    const ObservableRow& r = rows[i];
    if (sc.wants("S")) os << "," << csv_num(r.S);
    if (sc.wants("e_H")) os << "," << csv_num(r.e_H);
    if (sc.wants("var_H")) os << "," << csv_num(r.var_H);
    if (sc.wants("P")) os << "," << csv_num(r.P);
    if (want_bloch && r.x)
      os << "," << csv_num(r.x->x1) << "," << csv_num(r.x->x2) << ","
         << csv_num(r.x->x3);
    os << "\n";
  }
  return os.str();
}

/// Portrait CSV: census in the header comments, then field samples
/// (both charts, Bloch image), then streamline polylines.
inline std::string portrait_csv(const Portrait& p) {
  std::ostringstream os;
  os << "# critical-point census";
  if (!p.census_available) {
    os << ": unavailable for these parameters (no closed form)\n";
  } else {
    os << " (" << p.census.size() << " points)\n";
    for (const auto& c : p.census) {
      os << "# chart " << c.chart << " z = " << csv_num(c.z.real()) << " + "
         << csv_num(c.z.imag()) << "i : " << to_string(c.type);
      if (c.field_singular) {
        os << " (singular point of the coupling field)";
      } else {
        os << ", eigenvalues " << csv_num(c.eigenvalues[0].real()) << "+"
           << csv_num(c.eigenvalues[0].imag()) << "i, "
           << csv_num(c.eigenvalues[1].real()) << "+"
           << csv_num(c.eigenvalues[1].imag()) << "i";
      }
      os << "\n";
    }
  }
  os << "section,chart,seed,t,z_re,z_im,dz_re,dz_im,x1,x2,x3\n";
  for (const auto& s : p.samples) {
    os << "field," << s.chart << ",0,0," << csv_num(s.z.real()) << ","
       << csv_num(s.z.imag()) << "," << csv_num(s.zdot.real()) << ","
       << csv_num(s.zdot.imag()) << "," << csv_num(s.x.x1) << ","
       << csv_num(s.x.x2) << "," << csv_num(s.x.x3) << "\n";
  }
  for (const auto& q : p.streamlines) {
    ProjectiveState st;
    st.chart = 2;
    st.z.resize(1);
    st.z[0] = q.z;
    const BlochPoint x = bloch(st);
    os << "streamline,2," << q.seed << "," << csv_num(q.t) << ","
       << csv_num(q.z.real()) << "," << csv_num(q.z.imag()) << ",0,0,"
       << csv_num(x.x1) << "," << csv_num(x.x2) << "," << csv_num(x.x3)
       << "\n";
  }
  return os.str();
}

}  // namespace cqd

#endif
