#pragma once

#include <string>

#include "qcal/calderon.hpp"
#include "qcal/cem.hpp"
#include "qcal/quasiconformal.hpp"
#include "qcal/tensor.hpp"

namespace qcal {

/// Hashes embedded in every output file.
struct Provenance {
  std::string config_hash;
  std::string simulation_hash;
  std::string map_hash;
};

std::string voltage_data_to_json(const VoltageData& data, const Provenance& prov);
VoltageData voltage_data_from_json(const std::string& text, Provenance* prov = nullptr);

std::string dn_matrix_to_json(const DnMatrix& dn, const Provenance& prov);
DnMatrix dn_matrix_from_json(const std::string& text, Provenance* prov = nullptr);

/// Binary grid: int64 n, double s, double r, then n*n complex doubles
/// (re, im) of Phi in row-major order, rows along y, little-endian. The JSON
/// sidecar carries the solver record and provenance.
void write_qcmap(const QcMap& map, const std::string& bin_path, const std::string& json_path,
                 const Provenance& prov);
QcMap read_qcmap(const std::string& bin_path, const std::string& json_path, Provenance* prov = nullptr);

/// Binary: int64 m, double R, double dz, then m*m complex doubles. JSON
/// sidecar: lattice metadata, normalization and provenance.
void write_fhat(const FhatGrid& fhat, const std::string& bin_path, const std::string& json_path,
                const Provenance& prov);
FhatGrid read_fhat(const std::string& bin_path, const std::string& json_path, Provenance* prov = nullptr);

/// Binary: int64 size, then a (size*size doubles, NaN outside the disk) and
/// atilde (size*size doubles, NaN outside Phi(Omega)). JSON sidecar: axes,
/// A0, truncation radius, imaginary residual, provenance.
void write_reconstruction(const ReconstructedField& field, double truncation, const std::string& bin_path,
                          const std::string& json_path, const Provenance& prov);
ReconstructedField read_reconstruction(const std::string& bin_path, const std::string& json_path,
                                       Provenance* prov = nullptr, double* truncation = nullptr);

/// CSV with header x,a,target along the row through the origin.
void write_cross_section(const ReconstructedField& field, const ScalarField& target, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// FNV-1a hex digest of a file's bytes.
std::string file_hash(const std::string& path);

}  // namespace qcal
