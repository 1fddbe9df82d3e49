// Copyright 2026 The vtmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vtmarket/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vtmarket {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

ChannelParams::ChannelParams(double transmit_power_dbm, double unit_gain_db,
                             double distance_m, double path_loss_exp,
                             double noise_power_dbm)
    : transmit_power_dbm_(transmit_power_dbm),
      unit_gain_db_(unit_gain_db),
      distance_m_(distance_m),
      path_loss_exp_(path_loss_exp),
      noise_power_dbm_(noise_power_dbm) {
  if (!std::isfinite(distance_m) || distance_m <= 0.0) {
    throw std::invalid_argument("ChannelParams: distance_m must be > 0, got " +
                                std::to_string(distance_m));
  }
  if (!std::isfinite(path_loss_exp) || path_loss_exp < 0.0) {
    throw std::invalid_argument(
        "ChannelParams: path_loss_exp must be >= 0, got " +
        std::to_string(path_loss_exp));
  }
  // dBm and dB values cancel their reference units in the ratio, so the
  // conversion below is valid as long as power and noise use the same scale.
  const double power = db_to_linear(transmit_power_dbm);
  const double gain = db_to_linear(unit_gain_db);
  const double noise = db_to_linear(noise_power_dbm);
  const double geometry = std::pow(distance_m, -path_loss_exp);
  snr_linear_ = power * gain * geometry / noise;
  if (!std::isfinite(snr_linear_) || snr_linear_ <= 0.0) {
    throw std::invalid_argument(
        "ChannelParams: linear SNR is not finite and positive; the dB/dBm "
        "fields overflow or underflow the double range");
  }
  // log1p keeps the factor strictly positive for very small SNR.
  rate_factor_ = std::log1p(snr_linear_) / M_LN2;
  if (!std::isfinite(rate_factor_) || rate_factor_ <= 0.0) {
    throw std::invalid_argument("ChannelParams: rate factor must be finite "
                                "and positive");
  }
}

ChannelParams::ChannelParams()
    : ChannelParams(/*transmit_power_dbm=*/40.0, /*unit_gain_db=*/-20.0,
                    /*distance_m=*/500.0, /*path_loss_exp=*/2.0,
                    /*noise_power_dbm=*/-150.0) {}

double rate_factor(const ChannelParams& channel) {
  return channel.rate_factor();
}

double transmission_rate(double bandwidth, const ChannelParams& channel) {
  if (!(bandwidth > 0.0)) {
    throw std::domain_error("transmission_rate: bandwidth must be > 0, got " +
                            std::to_string(bandwidth));
  }
  return bandwidth * channel.rate_factor();
}

double aotm(double data_size, double rate) {
  if (!(data_size > 0.0)) {
    throw std::domain_error("aotm: data_size must be > 0, got " +
                            std::to_string(data_size));
  }
  if (!(rate > 0.0)) {
    throw std::domain_error("aotm: rate must be > 0, got " +
                            std::to_string(rate));
  }
  return data_size / rate;
}

}  // namespace vtmarket
