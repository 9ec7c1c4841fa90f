#include "capsim/power.hpp"

#include <cmath>

#include "capsim/errors.hpp"

namespace capsim::power {

void SensingPowerParams::validate() const {
  if (p_sample_uw < 0.0 || t_sample_ms < 0.0 || p_sleep_uw < 0.0 || rate_hz < 0.0)
    throw ConfigError("SensingPowerParams: all fields must be >= 0");
}

double sensing_power_uw(const SensingPowerParams& params) {
  params.validate();
  const double duty = params.t_sample_ms * params.rate_hz / 1000.0;
  if (duty > 1.0) return params.p_sample_uw;
  return duty * params.p_sample_uw + (1.0 - duty) * params.p_sleep_uw;
}

void TxProfile::validate() const {
  if (channels < 1) throw ConfigError("TxProfile: channels must be >= 1");
  if (max_extra_bytes_per_packet < 1)
    throw ConfigError("TxProfile: max extra bytes per packet must be >= 1");
  if (per_extra_byte_ms < 0.0) throw ConfigError("TxProfile: per-byte time must be >= 0");
}

TxCost tx_energy(const TxProfile& profile, int payload_bytes) {
  profile.validate();
  if (payload_bytes < 0) throw ConfigError("tx_energy: payload must be >= 0");

  TxCost cost;
  cost.packets_per_channel =
      payload_bytes == 0
          ? 1
          : (payload_bytes + profile.max_extra_bytes_per_packet - 1) /
                profile.max_extra_bytes_per_packet;
  const int extra_bytes_per_packet =
      payload_bytes == 0
          ? 0
          : (payload_bytes + cost.packets_per_channel - 1) / cost.packets_per_channel;

  const int transmissions = cost.packets_per_channel * profile.channels;
  const int gaps = transmissions - 1;
  const double packet_ms =
      profile.per_channel_tx_base.duration_ms + profile.per_extra_byte_ms * extra_bytes_per_packet;

  cost.duration_ms = profile.setup.duration_ms + profile.post.duration_ms +
                     transmissions * packet_ms + gaps * profile.inter_tx_gap.duration_ms;
  cost.energy_uj = profile.setup.energy_uj() + profile.post.energy_uj() +
                   transmissions * packet_ms * profile.per_channel_tx_base.power_uw / 1000.0 +
                   gaps * profile.inter_tx_gap.energy_uj();
  return cost;
}

void SystemPowerInput::validate() const {
  sensing.validate();
  if (tx_energy_uj < 0.0 || tx_duration_ms < 0.0)
    throw ConfigError("SystemPowerInput: transmission cost must be >= 0");
  if (period_s <= 0.0) throw ConfigError("SystemPowerInput: period must be > 0");
}

double system_power_uw(const SystemPowerInput& input) {
  input.validate();
  const double sensing_uw = sensing_power_uw(input.sensing);
  const double tx_duration_s = input.tx_duration_ms / 1000.0;
  return (sensing_uw * input.period_s + input.tx_energy_uj) / (input.period_s + tx_duration_s);
}

}  // namespace capsim::power
