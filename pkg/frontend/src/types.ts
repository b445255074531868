// Wire shapes of the phonolex JSON API.

export type FilterChoice = 'include' | 'exclude'
export type Axes = 'normal' | 'flip'

export interface FieldInfo {
    marker: string
    attribute: string
    position: number
    label: string
    kind: 'text' | 'media' | 'flags' | 'image-ref'
}

export interface QueryBody {
    display: 'count' | string[]
    patterns: Record<string, string>
    projections: Record<string, string>
    loanwords: FilterChoice
    suffixed: FilterChoice
    phrases: FilterChoice
    time_limit: number
    axes: Axes
    vars: string
}

export interface SchemaResponse {
    separator: string
    record_count: number
    fields: FieldInfo[]
    default_form: QueryBody
}

export interface Fragment {
    kind: 'media' | 'image' | 'text'
    value: string
    attribute: string
}

export interface TableBlock {
    key: string[]
    count: number
    items?: Fragment[][]
}

export interface TableJson {
    mode: 'count' | 'items'
    row_labels: string[]
    col_labels: string[]
    inner_dims: number[]
    inner_labels: string[][]
    cells: TableBlock[][][]
}

export interface QueryResponse {
    table: TableJson
    truncated: boolean
    matched_count: number
    diagnostics: string[]
}

export interface QueryIssue {
    attribute: string | null
    message: string
    position: number | null
}

export interface QueryErrors {
    errors: QueryIssue[]
}
