#pragma once

namespace capsim::power {

// Inputs of the duty-cycled sampling power model. A sampling event costs
// p_sample_uw for t_sample_ms; between events the MCU sleeps at p_sleep_uw.
struct SensingPowerParams {
  double p_sample_uw = 480.0;
  double t_sample_ms = 0.6;
  double p_sleep_uw = 6.0;
  double rate_hz = 0.2;

  void validate() const;
};

/// Average sampling power: duty-weighted blend of the sampling and sleep
/// states while t_sample·rate <= 1 s/s, saturating at p_sample beyond that.
double sensing_power_uw(const SensingPowerParams& params);

struct PhaseCost {
  double duration_ms = 0.0;
  double power_uw = 0.0;

  double energy_uj() const { return duration_ms * power_uw / 1000.0; }
};

// BLE broadcast state machine: radio setup, one beacon transmission per
// channel (repeated per packet), fixed gaps between consecutive
// transmissions, post-processing, then back to sleep. Extra payload bytes
// ride on the fixed 19-byte beacon and stretch each transmission.
struct TxProfile {
  PhaseCost setup{1.12, 1008.0};
  PhaseCost per_channel_tx_base{0.28, 3990.0};
  PhaseCost inter_tx_gap{0.30, 2460.0};
  PhaseCost post{1.72, 744.0};
  double per_extra_byte_ms = 0.008;
  int max_extra_bytes_per_packet = 28;
  int channels = 3;

  void validate() const;
};

struct TxCost {
  double energy_uj = 0.0;
  double duration_ms = 0.0;
  int packets_per_channel = 0;

  double avg_power_mw() const { return duration_ms > 0.0 ? energy_uj / duration_ms : 0.0; }
};

/// Energy and on-air time to broadcast payload_bytes of application data.
/// Packets per channel = ceil(payload/28) (minimum 1, beacons are always
/// sent); every packet in a burst is billed the same padded extra-byte count.
TxCost tx_energy(const TxProfile& profile, int payload_bytes);

struct SystemPowerInput {
  SensingPowerParams sensing;
  double tx_energy_uj = 0.0;
  double tx_duration_ms = 0.0;
  double period_s = 5.0;

  void validate() const;
};

/// Overall system power: sensing power over one reporting period plus the
/// transmission burst, averaged over the stretched period.
double system_power_uw(const SystemPowerInput& input);

}  // namespace capsim::power
