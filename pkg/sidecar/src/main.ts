/**
 * Entry point: --listen host:port, --model name, --max-batch n.
 *
 * The default model is the real sentence-similarity transformer; pass
 * `--model test:hash` for the deterministic offline backend. A model that
 * fails to load is a startup error with a nonzero exit.
 */

import { createEmbedder, DEFAULT_MODEL } from "./embedder.js";
import { startServer } from "./server.js";

interface CliOptions {
  listen: string;
  model: string;
  maxBatch: number;
}

function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = { listen: "127.0.0.1:9377", model: DEFAULT_MODEL, maxBatch: 64 };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--listen":
        options.listen = value;
        i++;
        break;
      case "--model":
        options.model = value;
        i++;
        break;
      case "--max-batch":
        options.maxBatch = Number(value);
        i++;
        break;
      default:
        throw new Error(`unknown flag: ${flag}`);
    }
  }
  if (!options.listen || !options.listen.includes(":")) {
    throw new Error("--listen needs host:port");
  }
  if (!Number.isInteger(options.maxBatch) || options.maxBatch < 1) {
    throw new Error("--max-batch must be a positive integer");
  }
  return options;
}

async function main(): Promise<void> {
  const options = parseArgs(process.argv.slice(2));
  const colon = options.listen.lastIndexOf(":");
  const host = options.listen.slice(0, colon);
  const port = Number(options.listen.slice(colon + 1));

  const embedder = await createEmbedder(options.model);
  const server = await startServer({ host, port, embedder, maxBatch: options.maxBatch });
  console.log(
    `encoder-sidecar listening on ${server.address.host}:${server.address.port} ` +
      `(model=${embedder.modelName}, dim=${embedder.dim}, max-batch=${options.maxBatch})`,
  );

  const shutdown = () => {
    server.close().finally(() => process.exit(0));
  };
  process.on("SIGINT", shutdown);
  process.on("SIGTERM", shutdown);
}

main().catch((error) => {
  console.error(`startup error: ${error instanceof Error ? error.message : error}`);
  process.exit(1);
});
