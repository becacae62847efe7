#!/usr/bin/env node
/**
 * pmiseg-extract: turn WAV audio into the interchange files the core
 * segmentation toolkit consumes.
 *
 *   train-quantizer  fit k-means units on frame features, write centroids
 *   tokenize         quantize audio into token-stream manifest lines
 *   score-spans      span log-probs under a core model file -> external scores
 *   embed            mean-pooled per-sentence features -> embeddings file
 *   concat           splice labeled recordings into one benchmark utterance
 *
 * Flag names mirror the core CLI where the two overlap.
 */

import { basename } from "node:path";
import { parseArgs } from "node:util";
import { readFileSync, writeFileSync } from "node:fs";
import { z } from "zod";

import { spliceSegments, type LabeledAudio } from "./concat.js";
import { DEFAULT_FEATURES } from "./dsp.js";
import { embedSentences } from "./embeddings.js";
import {
  fitSegmentsToDuration,
  readManifest,
  segmentSchema,
  stableStringify,
  writeJsonl,
  type ManifestLine,
  type Segment,
} from "./interchange.js";
import { loadQuantizer, quantize, saveQuantizer, trainKmeans } from "./quantizer.js";
import { logMelFrames, frameRateHz } from "./dsp.js";
import { loadModel } from "./ngram.js";
import { scoreSpans } from "./scores.js";
import { readWavAt16k, writeWav, TARGET_SAMPLE_RATE } from "./wav.js";

const USAGE = `usage: pmiseg-extract <command> [options]

commands:
  train-quantizer --wav FILE [--wav FILE ...] --clusters K --out FILE
                  [--seed N] [--mels N]
  tokenize        --wav FILE [--wav FILE ...] --centroids FILE --out FILE
                  [--refs FILE]
  score-spans     --manifest FILE --model FILE --out FILE
                  [--sentence-len S] [--max-span-tokens N]
  embed           --wav FILE [--wav FILE ...] --out FILE
                  [--centroids FILE] [--sentence-len S]
  concat          --wav FILE --label L --wav FILE --label L [...] --out FILE
                  --refs FILE [--segments N] [--seg-min S] [--seg-max S] [--seed N]
`;

function requireStr(v: string | undefined, flag: string): string {
  if (v === undefined) throw new Error(`missing required ${flag}`);
  return v;
}

function num(v: string | undefined, flag: string, fallback?: number): number {
  if (v === undefined) {
    if (fallback === undefined) throw new Error(`missing required ${flag}`);
    return fallback;
  }
  const n = Number(v);
  if (!Number.isFinite(n)) throw new Error(`${flag} must be a number, got "${v}"`);
  return n;
}

function utteranceId(wavPath: string): string {
  return basename(wavPath).replace(/\.wav$/i, "");
}

function cmdTrainQuantizer(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      wav: { type: "string", multiple: true },
      clusters: { type: "string" },
      seed: { type: "string" },
      mels: { type: "string" },
      out: { type: "string" },
    },
  });
  const wavs = values.wav ?? [];
  if (wavs.length === 0) throw new Error("missing required --wav");
  const k = num(values.clusters, "--clusters");
  const features = { ...DEFAULT_FEATURES, nMels: Math.round(num(values.mels, "--mels", DEFAULT_FEATURES.nMels)) };

  const points: number[][] = [];
  for (const path of wavs) {
    points.push(...logMelFrames(readWavAt16k(path), features));
  }
  const centroids = trainKmeans(points, Math.round(k), Math.round(num(values.seed, "--seed", 0)));
  saveQuantizer({ features, centroids }, requireStr(values.out, "--out"));
  console.error(`trained ${centroids.length} units on ${points.length} frames from ${wavs.length} file(s)`);
  return 0;
}

const refsFileSchema = z.array(segmentSchema);

function loadRefs(path: string): Segment[] {
  const parsed = refsFileSchema.safeParse(JSON.parse(readFileSync(path, "utf8")));
  if (!parsed.success) {
    throw new Error(`${path}: invalid reference segments: ${parsed.error.issues[0]?.message}`);
  }
  return parsed.data;
}

function cmdTokenize(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      wav: { type: "string", multiple: true },
      centroids: { type: "string" },
      refs: { type: "string" },
      out: { type: "string" },
    },
  });
  const wavs = values.wav ?? [];
  if (wavs.length === 0) throw new Error("missing required --wav");
  if (values.refs !== undefined && wavs.length !== 1) {
    throw new Error("--refs applies to a single --wav");
  }
  const q = loadQuantizer(requireStr(values.centroids, "--centroids"));
  const lines: ManifestLine[] = [];
  for (const path of wavs) {
    const frames = logMelFrames(readWavAt16k(path), q.features);
    const line: ManifestLine = {
      utterance_id: utteranceId(path),
      frame_rate_hz: frameRateHz(q.features),
      vocab_size: q.centroids.length,
      tokens: quantize(frames, q.centroids),
      generator: "wav-kmeans-units",
    };
    if (values.refs !== undefined) {
      line.segments = fitSegmentsToDuration(
        loadRefs(values.refs),
        line.tokens.length / line.frame_rate_hz,
      );
    }
    lines.push(line);
  }
  writeJsonl(requireStr(values.out, "--out"), lines);
  console.error(`tokenized ${lines.length} file(s)`);
  return 0;
}

function cmdScoreSpans(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      manifest: { type: "string" },
      model: { type: "string" },
      "sentence-len": { type: "string" },
      "max-span-tokens": { type: "string" },
      out: { type: "string" },
    },
  });
  const model = loadModel(requireStr(values.model, "--model"));
  const sentenceLenS = num(values["sentence-len"], "--sentence-len", 0.5);
  const maxSpanTokens = Math.round(num(values["max-span-tokens"], "--max-span-tokens", 0));
  const utts = readManifest(requireStr(values.manifest, "--manifest"));
  const records = utts.map((utt) => scoreSpans(utt, model, { sentenceLenS, maxSpanTokens }));
  records.sort((a, b) => (a.utterance_id < b.utterance_id ? -1 : 1));
  writeJsonl(requireStr(values.out, "--out"), records);
  console.error(`scored ${records.length} utterance(s)`);
  return 0;
}

function cmdEmbed(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      wav: { type: "string", multiple: true },
      centroids: { type: "string" },
      "sentence-len": { type: "string" },
      out: { type: "string" },
    },
  });
  const wavs = values.wav ?? [];
  if (wavs.length === 0) throw new Error("missing required --wav");
  const features =
    values.centroids !== undefined ? loadQuantizer(values.centroids).features : DEFAULT_FEATURES;
  const sentenceLenS = num(values["sentence-len"], "--sentence-len", 0.5);
  const records = wavs.map((path) =>
    embedSentences(utteranceId(path), readWavAt16k(path), sentenceLenS, features),
  );
  records.sort((a, b) => (a.utterance_id < b.utterance_id ? -1 : 1));
  writeJsonl(requireStr(values.out, "--out"), records);
  console.error(`embedded ${records.length} file(s)`);
  return 0;
}

function cmdConcat(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      wav: { type: "string", multiple: true },
      label: { type: "string", multiple: true },
      segments: { type: "string" },
      "seg-min": { type: "string" },
      "seg-max": { type: "string" },
      seed: { type: "string" },
      out: { type: "string" },
      refs: { type: "string" },
    },
  });
  const wavs = values.wav ?? [];
  const labels = values.label ?? [];
  if (wavs.length !== labels.length) {
    throw new Error(`got ${wavs.length} --wav but ${labels.length} --label; they pair up in order`);
  }
  const sources: LabeledAudio[] = wavs.map((path, i) => ({
    label: labels[i]!,
    samples: readWavAt16k(path),
  }));
  const spliced = spliceSegments(sources, {
    nSegments: Math.round(num(values.segments, "--segments", 8)),
    segMinS: num(values["seg-min"], "--seg-min", 1.0),
    segMaxS: num(values["seg-max"], "--seg-max", 3.0),
    sampleRate: TARGET_SAMPLE_RATE,
    seed: Math.round(num(values.seed, "--seed", 0)),
  });
  writeWav(requireStr(values.out, "--out"), spliced.samples, TARGET_SAMPLE_RATE);
  writeFileSync(requireStr(values.refs, "--refs"), stableStringify(spliced.segments) + "\n");
  console.error(
    `spliced ${spliced.segments.length} segment(s), ` +
      `${(spliced.samples.length / TARGET_SAMPLE_RATE).toFixed(2)} s total`,
  );
  return 0;
}

const COMMANDS: Record<string, (argv: string[]) => number> = {
  "train-quantizer": cmdTrainQuantizer,
  tokenize: cmdTokenize,
  "score-spans": cmdScoreSpans,
  embed: cmdEmbed,
  concat: cmdConcat,
};

export function main(argv: string[]): number {
  const [cmd, ...rest] = argv;
  if (cmd === undefined || cmd === "-h" || cmd === "--help") {
    process.stdout.write(USAGE);
    return cmd === undefined ? 1 : 0;
  }
  const run = COMMANDS[cmd];
  if (run === undefined) {
    console.error(`pmiseg-extract: unknown command "${cmd}"\n${USAGE}`);
    return 1;
  }
  try {
    return run(rest);
  } catch (e) {
    console.error(`pmiseg-extract: ${(e as Error).message}`);
    return 1;
  }
}

// Run directly (not imported by a test).
const entry = process.argv[1];
if (entry !== undefined && import.meta.url === new URL(`file://${entry}`).href) {
  process.exit(main(process.argv.slice(2)));
}
