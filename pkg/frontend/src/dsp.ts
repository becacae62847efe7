/**
 * Frame-level spectral features: log mel-band energies over a Hann-windowed
 * short-time FFT. Defaults give one 16-dim feature vector every 20 ms
 * (50 Hz) on 16 kHz input, which is the frame rate the token pipeline
 * assumes downstream.
 */

import FFT from "fft.js";

export interface FeatureConfig {
  sampleRate: number; // Hz, after any resampling
  frameLen: number; // analysis window, samples
  hop: number; // frame step, samples
  fftSize: number; // power of two >= frameLen
  nMels: number;
  fminHz: number;
  fmaxHz: number;
}

export const DEFAULT_FEATURES: FeatureConfig = {
  sampleRate: 16000,
  frameLen: 400,
  hop: 320,
  fftSize: 512,
  nMels: 16,
  fminHz: 50,
  fmaxHz: 8000,
};

export function frameRateHz(cfg: FeatureConfig): number {
  return cfg.sampleRate / cfg.hop;
}

function hannWindow(n: number): Float64Array {
  const w = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    w[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / (n - 1));
  }
  return w;
}

function hzToMel(hz: number): number {
  return 2595 * Math.log10(1 + hz / 700);
}

function melToHz(mel: number): number {
  return 700 * (Math.pow(10, mel / 2595) - 1);
}

/**
 * Triangular mel filterbank as a dense [nMels][nBins] weight matrix over
 * FFT magnitude bins 0..fftSize/2.
 */
export function melFilterbank(cfg: FeatureConfig): Float64Array[] {
  const nBins = cfg.fftSize / 2 + 1;
  const mLo = hzToMel(cfg.fminHz);
  const mHi = hzToMel(cfg.fmaxHz);
  // nMels triangles need nMels + 2 edge points.
  const edges: number[] = [];
  for (let i = 0; i < cfg.nMels + 2; i++) {
    const hz = melToHz(mLo + ((mHi - mLo) * i) / (cfg.nMels + 1));
    edges.push((hz * cfg.fftSize) / cfg.sampleRate);
  }
  const bank: Float64Array[] = [];
  for (let m = 0; m < cfg.nMels; m++) {
    const row = new Float64Array(nBins);
    const [a, b, c] = [edges[m]!, edges[m + 1]!, edges[m + 2]!];
    for (let k = 0; k < nBins; k++) {
      if (k > a && k < c) {
        row[k] = k <= b ? (k - a) / (b - a) : (c - k) / (c - b);
      }
    }
    bank.push(row);
  }
  return bank;
}

/**
 * Log mel-band energies for every frame.
 *
 * Frame t covers samples [t*hop, t*hop + frameLen), zero-padded past the
 * signal end; the frame count is floor(n / hop), floored at one, so a 5 s
 * clip at the default config yields exactly 250 frames.
 */
export function logMelFrames(samples: Float32Array, cfg: FeatureConfig = DEFAULT_FEATURES): number[][] {
  if (samples.length === 0) {
    throw new Error("cannot extract features from empty audio");
  }
  if (cfg.frameLen > cfg.fftSize) {
    throw new Error(`frameLen ${cfg.frameLen} exceeds fftSize ${cfg.fftSize}`);
  }
  const nFrames = Math.max(1, Math.floor(samples.length / cfg.hop));
  const window = hannWindow(cfg.frameLen);
  const bank = melFilterbank(cfg);
  const nBins = cfg.fftSize / 2 + 1;

  const fft = new FFT(cfg.fftSize);
  const spectrum = fft.createComplexArray();
  const frame = new Array<number>(cfg.fftSize);
  const power = new Float64Array(nBins);

  const out: number[][] = [];
  for (let t = 0; t < nFrames; t++) {
    const start = t * cfg.hop;
    for (let i = 0; i < cfg.fftSize; i++) {
      const s = start + i;
      frame[i] = i < cfg.frameLen && s < samples.length ? samples[s]! * window[i]! : 0;
    }
    fft.realTransform(spectrum, frame);
    for (let k = 0; k < nBins; k++) {
      const re = spectrum[2 * k]!;
      const im = spectrum[2 * k + 1]!;
      power[k] = re * re + im * im;
    }
    const feat = new Array<number>(cfg.nMels);
    for (let m = 0; m < cfg.nMels; m++) {
      let acc = 0;
      const row = bank[m]!;
      for (let k = 0; k < nBins; k++) acc += row[k]! * power[k]!;
      feat[m] = Math.log(acc + 1e-10);
    }
    out.push(feat);
  }
  return out;
}
