/**
 * Embedding backends behind one interface: the real transformer model, and a
 * deterministic hashed-trigram backend ("test:hash") for offline testing.
 */

import { createHash } from "node:crypto";

export interface Embedder {
  readonly modelName: string;
  readonly dim: number;
  encode(texts: string[]): Promise<number[][]>;
}

export function l2Normalize(vector: number[]): number[] {
  let sumSquares = 0;
  for (const x of vector) sumSquares += x * x;
  const norm = Math.sqrt(sumSquares);
  if (norm === 0) throw new Error("cannot normalize a zero vector");
  return vector.map((x) => x / norm);
}

/** Counts sha256-hashed character trigrams of the lowercased text. */
export class HashEmbedder implements Embedder {
  readonly modelName: string;
  readonly dim: number;

  constructor(modelName = "test:hash", dim = 384) {
    this.modelName = modelName;
    this.dim = dim;
  }

  private bucket(gram: string): number {
    const digest = createHash("sha256").update(gram, "utf8").digest();
    return digest.readUInt32BE(0) % this.dim;
  }

  async encode(texts: string[]): Promise<number[][]> {
    return texts.map((text) => {
      if (!text.trim()) throw new Error("cannot encode an empty text");
      const s = text.toLowerCase();
      const grams = s.length < 3 ? [s] : Array.from({ length: s.length - 2 }, (_, i) => s.slice(i, i + 3));
      const vector = new Array<number>(this.dim).fill(0);
      for (const gram of grams) vector[this.bucket(gram)] += 1;
      return l2Normalize(vector);
    });
  }
}

const XENOVA_ALIASES: Record<string, string> = {
  "sentence-transformers/all-MiniLM-L6-v2": "Xenova/all-MiniLM-L6-v2",
};

/** Mean-pooled sentence embeddings from a transformers.js feature-extraction pipeline. */
export class XenovaEmbedder implements Embedder {
  readonly modelName: string;
  readonly dim: number;
  private readonly pipe: (texts: string[], opts: object) => Promise<{ data: Float32Array; dims: number[] }>;

  private constructor(modelName: string, dim: number, pipe: XenovaEmbedder["pipe"]) {
    this.modelName = modelName;
    this.dim = dim;
    this.pipe = pipe;
  }

  static async load(modelName: string): Promise<XenovaEmbedder> {
    const repo = XENOVA_ALIASES[modelName] ?? modelName;
    const transformers = await import("@xenova/transformers");
    const pipe = (await transformers.pipeline("feature-extraction", repo)) as unknown as XenovaEmbedder["pipe"];
    const probe = await pipe(["dimension probe"], { pooling: "mean", normalize: true });
    const dim = probe.dims[probe.dims.length - 1];
    return new XenovaEmbedder(modelName, dim, pipe);
  }

  async encode(texts: string[]): Promise<number[][]> {
    for (const text of texts) {
      if (!text.trim()) throw new Error("cannot encode an empty text");
    }
    const output = await this.pipe(texts, { pooling: "mean", normalize: true });
    const vectors: number[][] = [];
    for (let row = 0; row < texts.length; row++) {
      const offset = row * this.dim;
      // normalize again so the client can rely on unit norm bit-for-bit
      vectors.push(l2Normalize(Array.from(output.data.slice(offset, offset + this.dim))));
    }
    return vectors;
  }
}

export const DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2";

export async function createEmbedder(spec: string): Promise<Embedder> {
  if (spec === "test:hash" || spec.startsWith("test:hash:")) {
    const dim = spec.startsWith("test:hash:") ? Number(spec.split(":")[2]) : 384;
    if (!Number.isInteger(dim) || dim < 1) throw new Error(`bad test model dimension in ${spec}`);
    return new HashEmbedder(spec, dim);
  }
  return XenovaEmbedder.load(spec);
}
