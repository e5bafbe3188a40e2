// Minimal ambient declaration so the sidecar compiles without the model
// runtime installed. Run `npm install @xenova/transformers` to enable the
// real model backend; the hash backend needs nothing beyond node.
declare module "@xenova/transformers" {
  export function pipeline(task: string, model?: string): Promise<unknown>;
}
