/**
 * Logit record schema shared with the hedgekit harness: one JSON object
 * per line, named fields, optional label/perturbation/group.
 */

import { appendFileSync, writeFileSync } from 'fs'

export type ModelId = 'M1' | 'M2' | 'M3' | 'M4' | 'M5'
export type ViewName = 'orig' | 'hflip'

export interface LogitRecord {
  sample_id: string
  model_id: ModelId
  view: ViewName
  logit_real: number
  logit_fake: number
  label?: 'real' | 'fake'
  perturbation?: string
  group?: string
}

export function recordLine(record: LogitRecord): string {
  if (!Number.isFinite(record.logit_real) || !Number.isFinite(record.logit_fake)) {
    throw new Error(
      `non-finite logits for ${record.sample_id}/${record.model_id}/${record.view}`,
    )
  }
  return JSON.stringify(record)
}

export function writeRecords(path: string, records: LogitRecord[]): void {
  writeFileSync(path, '')
  for (const record of records) {
    appendFileSync(path, recordLine(record) + '\n')
  }
}
