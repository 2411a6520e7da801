#!/usr/bin/env node
/**
 * qwmix-plots render --kind KIND --in CSV... --out PATH [--epsilon E] [--title T]
 *
 * KIND is one of: limiting, mixing-curves, spectrum. Inputs are read-only;
 * the only file touched is --out. Exit 0 on success, 1 on any usage or
 * input problem.
 */

import { writeFileSync } from "fs";

import { InputError, readCsv } from "./csv.js";
import { buildFigure, FigureKind } from "./figures.js";

const KINDS = ["limiting", "mixing-curves", "spectrum"];

const USAGE =
  "usage: qwmix-plots render --kind {limiting|mixing-curves|spectrum} " +
  "--in FILE.csv [FILE.csv ...] --out FILE.svg [--epsilon E] [--title T]";

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
  epsilon?: number;
  title?: string;
}

export function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    throw new InputError(`unknown command "${argv[0] ?? ""}"\n${USAGE}`);
  }
  let kind = "";
  const inputs: string[] = [];
  let out = "";
  let epsilon: number | undefined;
  let title: string | undefined;
  let i = 1;
  while (i < argv.length) {
    const a = argv[i];
    if (a === "--kind") {
      kind = argv[++i] ?? "";
    } else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        inputs.push(argv[++i]);
      }
    } else if (a === "--out") {
      out = argv[++i] ?? "";
    } else if (a === "--epsilon") {
      epsilon = Number(argv[++i]);
      if (Number.isNaN(epsilon)) throw new InputError("--epsilon must be a number");
    } else if (a === "--title") {
      title = argv[++i] ?? "";
    } else {
      throw new InputError(`unknown flag "${a}"\n${USAGE}`);
    }
    i++;
  }
  if (!KINDS.includes(kind)) {
    throw new InputError(`--kind must be one of ${KINDS.join(", ")}\n${USAGE}`);
  }
  if (inputs.length === 0 || !out) {
    throw new InputError(`--in and --out are required\n${USAGE}`);
  }
  return { kind: kind as FigureKind, inputs, out, epsilon, title };
}

export function render(args: Args): string {
  const tables = args.inputs.map(readCsv);
  return buildFigure(args.kind, tables, { epsilon: args.epsilon, title: args.title });
}

function main(): number {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
    const svg = render(args);
    writeFileSync(args.out, svg);
  } catch (err) {
    if (err instanceof InputError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main());
}
