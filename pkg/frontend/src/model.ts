/** Shapes of the profiler service JSON, mirrored field-for-field.
 *
 * Non-finite numbers are serialized as null by the service; every numeric
 * field the UI displays is therefore `number | null`.
 */

export type MaybeNumber = number | null;

export interface CurvePoint {
  srr_target: number;
  ratio: number;
  r: number;
}

export interface RecommendedPoint extends CurvePoint {
  target_unreachable: boolean;
}

export interface SessionResponse {
  id: string;
  curve: CurvePoint[];
  recommended: RecommendedPoint;
}

export interface SpectrumJson {
  bins_db: MaybeNumber[];
  peak_db: number;
  floor_db: number;
  mean_db: number;
  dynamic_range_db: number;
}

export interface WindowsResponse {
  srr_target: number;
  ratio: number;
  metrics: Record<string, MaybeNumber>;
  spectra: { x: SpectrumJson; d: SpectrumJson };
  s2r: { cdf: [number, number][]; two_sigma_margin_db: MaybeNumber };
}

export interface SynthSource {
  kind: string;
  dtype: string;
  length: number;
  amplitude: number;
  oversampling_ratio?: number;
  snr_db?: number | null;
  offset?: number;
  seed?: number;
  name?: string;
}

export interface RawSource {
  path: string;
  dtype: string;
  byte_order?: string;
  element_count?: number;
}

export type SessionSource = { synth: SynthSource } | { raw: RawSource };

/** The 18 comparison metrics, in display order. */
export const METRIC_KEYS = [
  "mean_x", "std_x", "spectral_peak_x_db", "spectral_floor_x_db",
  "mean_y", "std_y", "spectral_peak_y_db", "spectral_floor_y_db",
  "mean_d", "std_d", "spectral_peak_d_db", "spectral_floor_d_db",
  "rms_resid_pct", "rms_resid_db",
  "srr_db", "pearson_r",
  "fft_s2r_margin_db", "two_sigma_s2r_margin_db",
] as const;
