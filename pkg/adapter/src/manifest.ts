/**
 * Adapter manifest: which checkpoint serves each ensemble slot, at what
 * input resolution, with what normalization, and which views it emits.
 *
 * Input resolutions are pinned per slot (M1-M3 at 256, M4 at 448, M5 at
 * 378); a manifest claiming a different resolution for a slot is invalid.
 */

import { readFileSync } from 'fs'
import { z } from 'zod'

import type { ModelId, ViewName } from './records'

export const EXPECTED_RESOLUTION: Record<ModelId, number> = {
  M1: 256,
  M2: 256,
  M3: 256,
  M4: 448,
  M5: 378,
}

/** Ensemble slots whose detectors run flip TTA by default. */
export const DEFAULT_TTA_MODELS: ModelId[] = ['M3', 'M4']

const modelEntrySchema = z.object({
  model_id: z.enum(['M1', 'M2', 'M3', 'M4', 'M5']),
  checkpoint: z.string().min(1),
  resolution: z.number().int().positive(),
  normalization: z
    .object({
      mean: z.tuple([z.number(), z.number(), z.number()]),
      std: z.tuple([z.number(), z.number(), z.number()]),
    })
    .default({ mean: [0.5, 0.5, 0.5], std: [0.5, 0.5, 0.5] }),
  views: z.array(z.enum(['orig', 'hflip'])).nonempty().default(['orig']),
})

const manifestSchema = z.object({
  models: z.array(modelEntrySchema).nonempty(),
})

export type ModelEntry = z.infer<typeof modelEntrySchema>
export type AdapterManifest = z.infer<typeof manifestSchema>

export function parseManifest(obj: unknown): AdapterManifest {
  const manifest = manifestSchema.parse(obj)
  const seen = new Set<string>()
  for (const entry of manifest.models) {
    if (seen.has(entry.model_id)) {
      throw new Error(`duplicate manifest entry for ${entry.model_id}`)
    }
    seen.add(entry.model_id)
    const expected = EXPECTED_RESOLUTION[entry.model_id as ModelId]
    if (entry.resolution !== expected) {
      throw new Error(
        `${entry.model_id} must run at ${expected}x${expected}, ` +
          `manifest says ${entry.resolution}`,
      )
    }
    if (new Set(entry.views).size !== entry.views.length) {
      throw new Error(`${entry.model_id} lists duplicate views`)
    }
  }
  return manifest
}

export function loadManifest(path: string): AdapterManifest {
  return parseManifest(JSON.parse(readFileSync(path, 'utf-8')))
}

export function viewsFor(entry: ModelEntry): ViewName[] {
  return entry.views as ViewName[]
}
