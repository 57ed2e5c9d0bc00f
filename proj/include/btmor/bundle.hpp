// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_BUNDLE_HPP
#define BTMOR_BUNDLE_HPP

#include <filesystem>

#include "btmor/dense_bt.hpp"
#include "btmor/descriptor.hpp"

namespace btmor {

// On-disk model bundle: a manifest text file ("# btmor manifest v1", then
// key = value lines) next to four Matrix Market files G.mtx, C.mtx, B.mtx,
// L.mtx. System bundles carry n, m and port names; ROM bundles carry r, p, q,
// the retained HSVs, the a-priori bound and provenance.

void save_system_bundle(const std::filesystem::path& dir, const DescriptorSystem& sys);
void save_rom_bundle(const std::filesystem::path& dir, const Rom& rom);

// True when the path is a bundle manifest (or a directory holding
// manifest.txt) rather than a netlist.
bool is_bundle_path(const std::filesystem::path& path);

// Load a netlist file or a bundle manifest into a descriptor system. ROM
// bundles load as dense descriptor systems with n = r, m = 0.
DescriptorSystem load_model(const std::filesystem::path& path);

}  // namespace btmor

#endif  // BTMOR_BUNDLE_HPP
